#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace fdstab {

/// Outcome of a sampled check. `worst_case` maps a coordinate name
/// ("xi", "z", "eta", ...) to its value at the worst sample.
struct Report {
  std::string check;
  bool pass = false;
  std::map<std::string, std::vector<double>> worst_case;
  double worst_value = 0.0;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
};

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json worst = nlohmann::json::object();
  for (const auto& [k, v] : r.worst_case) worst[k] = v;
  worst["value"] = r.worst_value;
  nlohmann::json j{{"check", r.check},         {"pass", r.pass},
                   {"worst_case", worst},      {"tolerances", r.tolerances},
                   {"seed", r.seed},           {"n_samples", r.n_samples},
                   {"metrics", r.metrics}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report r;
  r.check = j.at("check").get<std::string>();
  r.pass = j.at("pass").get<bool>();
  for (const auto& [k, v] : j.at("worst_case").items()) {
    if (k == "value") {
      r.worst_value = v.get<double>();
    } else {
      r.worst_case[k] = v.get<std::vector<double>>();
    }
  }
  r.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.n_samples = j.at("n_samples").get<std::size_t>();
  if (j.contains("metrics")) r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

}  // namespace fdstab
