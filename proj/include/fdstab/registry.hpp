#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fdstab/errors.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/validate.hpp"

namespace fdstab {

/// Named scheme parameters, e.g. {"a": -1, "lambda": 0.8}.
using SchemeParams = std::map<std::string, double>;

inline MultistepScheme leapfrog1d(double a, double lambda) {
  const double la = lambda * a;
  const std::vector<StencilEntry> e{{{1}, 1, la}, {{-1}, 1, -la}, {{0}, 2, 1.0}, {{0}, 0, -1.0}};
  return MultistepScheme(1, {1}, {1}, {lambda}, e, "leapfrog1d");
}

inline MultistepScheme bdf2_1d(double a, double lambda) {
  const double la = lambda * a;
  const std::vector<StencilEntry> e{{{0}, 2, 1.5}, {{1}, 2, 0.5 * la}, {{-1}, 2, -0.5 * la},
                                    {{0}, 1, -2.0}, {{0}, 0, 0.5}};
  return MultistepScheme(1, {1}, {1}, {lambda}, e, "bdf2_1d");
}

/// Leap-frog with centered differences along each axis.
inline MultistepScheme lf2d_v1(double a1, double a2, double lambda1, double lambda2) {
  const double c1 = lambda1 * a1;
  const double c2 = lambda2 * a2;
  const std::vector<StencilEntry> e{{{1, 0}, 1, c1},  {{-1, 0}, 1, -c1}, {{0, 1}, 1, c2},
                                    {{0, -1}, 1, -c2}, {{0, 0}, 2, 1.0},  {{0, 0}, 0, -1.0}};
  return MultistepScheme(1, {1, 1}, {1, 1}, {lambda1, lambda2}, e, "lf2d_v1");
}

/// Leap-frog with the diagonal (averaged) centered differences.
inline MultistepScheme lf2d_v2(double a1, double a2, double lambda1, double lambda2) {
  const double c1 = lambda1 * a1;
  const double c2 = lambda2 * a2;
  const std::vector<StencilEntry> e{{{1, 1}, 1, 0.5 * (c1 + c2)},   {{1, -1}, 1, 0.5 * (c1 - c2)},
                                    {{-1, 1}, 1, 0.5 * (-c1 + c2)}, {{-1, -1}, 1, -0.5 * (c1 + c2)},
                                    {{0, 0}, 2, 1.0},               {{0, 0}, 0, -1.0}};
  return MultistepScheme(1, {1, 1}, {1, 1}, {lambda1, lambda2}, e, "lf2d_v2");
}

struct SchemeRegistryEntry {
  std::string name;
  SchemeParams defaults;
  std::function<MultistepScheme(const SchemeParams&)> make;
  std::string note;
};

class SchemeRegistry {
 public:
  void add(SchemeRegistryEntry e) {
    if (entries_.count(e.name)) throw InvalidArgument("registry: duplicate name " + e.name);
    entries_.emplace(e.name, std::move(e));
  }

  bool contains(const std::string& name) const { return entries_.count(name) > 0; }

  const SchemeRegistryEntry& entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw InvalidArgument("registry: unknown scheme '" + name + "'");
    return it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : entries_) out.push_back(k);
    return out;
  }

  /// Build from a name with parameter overrides; unknown parameters are rejected.
  MultistepScheme make(const std::string& name, const SchemeParams& overrides = {}) const {
    const auto& e = entry(name);
    SchemeParams p = e.defaults;
    for (const auto& [k, v] : overrides) {
      if (!p.count(k)) throw InvalidArgument("registry: scheme '" + name + "' has no parameter '" + k + "'");
      p[k] = v;
    }
    return e.make(p);
  }

  /// "name" or "name:key=value,key=value".
  MultistepScheme parse(const std::string& spec) const {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    SchemeParams overrides;
    if (colon != std::string::npos) {
      std::stringstream ss(spec.substr(colon + 1));
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidArgument("registry: expected key=value in '" + item + "'");
        try {
          std::size_t used = 0;
          const std::string value = item.substr(eq + 1);
          overrides[item.substr(0, eq)] = std::stod(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          throw InvalidArgument("registry: bad number in '" + item + "'");
        }
      }
    }
    return make(name, overrides);
  }

 private:
  std::map<std::string, SchemeRegistryEntry> entries_;
};

inline SchemeRegistry build_registry() {
  SchemeRegistry r;
  r.add({"leapfrog1d",
         {{"a", -1.0}, {"lambda", 0.8}},
         [](const SchemeParams& p) { return leapfrog1d(p.at("a"), p.at("lambda")); },
         "u^{n+2}_j + lambda a (u^{n+1}_{j+1} - u^{n+1}_{j-1}) - u^n_j = 0"});
  r.add({"bdf2_1d",
         {{"a", 1.0}, {"lambda", 0.5}},
         [](const SchemeParams& p) { return bdf2_1d(p.at("a"), p.at("lambda")); },
         "3/2 u^{n+2}_j + (lambda a / 2)(u^{n+2}_{j+1} - u^{n+2}_{j-1}) - 2 u^{n+1}_j + 1/2 u^n_j = 0"});
  r.add({"lf2d_v1",
         {{"a1", 1.0}, {"a2", 1.0}, {"lambda1", 0.4}, {"lambda2", 0.4}},
         [](const SchemeParams& p) { return lf2d_v1(p.at("a1"), p.at("a2"), p.at("lambda1"), p.at("lambda2")); },
         "leap-frog, axis-centered differences; stable for lambda1|a1| + lambda2|a2| < 1"});
  r.add({"lf2d_v2",
         {{"a1", 1.0}, {"a2", 1.0}, {"lambda1", 0.8}, {"lambda2", 0.8}},
         [](const SchemeParams& p) { return lf2d_v2(p.at("a1"), p.at("a2"), p.at("lambda1"), p.at("lambda2")); },
         "leap-frog, diagonal centered differences; stable for max(lambda1|a1|, lambda2|a2|) < 1"});
  for (const auto& name : r.names()) {
    const auto rep = validate_scheme(r.make(name), {.n_grid = 32});
    if (!rep.pass) throw Error("registry: default scheme '" + name + "' fails validation");
  }
  return r;
}

}  // namespace fdstab
