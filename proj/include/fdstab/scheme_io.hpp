#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdstab/errors.hpp"
#include "fdstab/scheme.hpp"

namespace fdstab {

/// Scheme file contents: the interior scheme and, optionally, its boundary rows.
struct SchemeFile {
  MultistepScheme scheme;
  std::optional<BoundaryStencilSet> boundary;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw InvalidArgument(where + ": unknown field '" + key + "'");
  }
}

inline MultiIndex read_index(const nlohmann::json& j, int d, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + " must be an array of integers");
  auto v = j.get<std::vector<int>>();
  if (static_cast<int>(v.size()) != d) throw InvalidArgument(what + " must have d entries");
  return MultiIndex(v);
}

inline nlohmann::json write_index(const MultiIndex& m) { return m.to_vector(); }

}  // namespace detail

inline SchemeFile scheme_from_json(const nlohmann::json& j, std::string name = {}) {
  try {
    detail::reject_unknown(j, {"d", "s", "p", "r", "lambda", "coeffs", "boundary"}, "scheme");
    const int d = j.at("d").get<int>();
    if (d != 1 && d != 2) throw InvalidArgument("scheme: d must be 1 or 2");
    const int s = j.at("s").get<int>();
    const auto p = detail::read_index(j.at("p"), d, "p");
    const auto r = detail::read_index(j.at("r"), d, "r");
    auto lambda = j.at("lambda").get<std::vector<double>>();
    std::vector<StencilEntry> entries;
    for (const auto& e : j.at("coeffs")) {
      detail::reject_unknown(e, {"l", "sigma", "a"}, "coeffs entry");
      entries.push_back({detail::read_index(e.at("l"), d, "l"), e.at("sigma").get<int>(), e.at("a").get<double>()});
    }
    MultistepScheme scheme(s, p, r, std::move(lambda), entries, std::move(name));
    std::optional<BoundaryStencilSet> boundary;
    if (j.contains("boundary")) {
      const auto& bj = j.at("boundary");
      detail::reject_unknown(bj, {"q", "b"}, "boundary");
      const auto q = detail::read_index(bj.at("q"), d, "q");
      std::vector<BoundaryEntry> bentries;
      if (bj.contains("b")) {
        for (const auto& e : bj.at("b")) {
          detail::reject_unknown(e, {"l", "j1", "sigma", "b"}, "boundary entry");
          bentries.push_back({detail::read_index(e.at("l"), d, "l"), e.at("j1").get<int>(),
                              e.at("sigma").get<int>(), e.at("b").get<double>()});
        }
      }
      boundary.emplace(scheme, q, bentries);
    }
    return {std::move(scheme), std::move(boundary)};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("scheme file: ") + e.what());
  }
}

inline nlohmann::json scheme_to_json(const MultistepScheme& scheme,
                                     const std::optional<BoundaryStencilSet>& boundary = std::nullopt) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& e : scheme.entries()) {
    coeffs.push_back({{"l", detail::write_index(e.l)}, {"sigma", e.sigma}, {"a", e.a}});
  }
  nlohmann::json j{{"d", scheme.d()},
                   {"s", scheme.s()},
                   {"p", detail::write_index(scheme.p())},
                   {"r", detail::write_index(scheme.r())},
                   {"lambda", scheme.lambda()},
                   {"coeffs", coeffs}};
  if (boundary) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& e : boundary->entries()) {
      b.push_back({{"l", detail::write_index(e.l)}, {"j1", e.j1}, {"sigma", e.sigma}, {"b", e.b}});
    }
    j["boundary"] = {{"q", detail::write_index(boundary->q())}, {"b", b}};
  }
  return j;
}

inline SchemeFile load_scheme_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scheme file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("scheme file " + path.string() + ": " + e.what());
  }
  return scheme_from_json(j, path.stem().string());
}

}  // namespace fdstab
