#pragma once

// JSON run configuration shared by the `sweep` and `verify` commands.
//
//   {
//     "prior":      {"kind": "gaussian", "mean": 0, "variance": 1}
//                 | {"kind": "discrete", "atoms": [[-1, 0.5], [1, 0.5]]},
//     "beta_grid":  {"min": 0.1, "max": 10, "points": 16, "spacing": "log"}
//                 | {"values": [0.5, 1, 2]},
//     "quadrature": {any QuadratureConfig field},
//     "oracle":     {"mc_samples": 100000, "seed": 42},   mc_samples 0 skips
//                                                         the oracle check
//     "verify":     {"strict_classical": false}
//   }

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermi/distributions.hpp"
#include "thermi/errors.hpp"
#include "thermi/quadrature.hpp"
#include "thermi/reference.hpp"

namespace thermi {

using json = nlohmann::json;

struct VerifyOptions {
  /// Require the classical route to match the generalized one.
  bool strict_classical = false;

  friend bool operator==(const VerifyOptions&, const VerifyOptions&) = default;
};

struct RunConfig {
  InputDistribution prior = make_gaussian(0.0, 1.0);
  std::vector<double> betas;
  QuadratureConfig quadrature;
  OracleConfig oracle;
  VerifyOptions verify;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) {
  throw Error(ErrorCode::ConfigError, msg);
}

inline double number_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(where + "." + key + " is missing");
  if (!it->is_number()) config_error(where + "." + key + " must be a number");
  return it->get<double>();
}

template <typename T>
void optional_field(const json& obj, const char* key, const std::string& where, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) config_error(where + "." + key + " must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) config_error(where + "." + key + " must be an integer");
  } else {
    if (!it->is_number()) config_error(where + "." + key + " must be a number");
  }
  out = it->get<T>();
}

}  // namespace detail

inline json prior_to_json(const InputDistribution& dist) {
  if (dist.is_gaussian()) {
    return json{{"kind", "gaussian"}, {"mean", dist.mean()}, {"variance", dist.variance()}};
  }
  json atoms = json::array();
  for (const auto& a : dist.atoms()) atoms.push_back(json::array({a.value, a.prob}));
  return json{{"kind", "discrete"}, {"atoms", atoms}};
}

inline InputDistribution prior_from_json(const json& j) {
  if (!j.is_object()) detail::config_error("prior must be an object");
  const auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) detail::config_error("prior.kind must be a string");
  try {
    if (*kind == "gaussian") {
      return make_gaussian(detail::number_field(j, "mean", "prior"),
                           detail::number_field(j, "variance", "prior"));
    }
    if (*kind == "discrete") {
      const auto atoms = j.find("atoms");
      if (atoms == j.end() || !atoms->is_array()) {
        detail::config_error("prior.atoms must be an array of [value, prob] pairs");
      }
      std::vector<Atom> out;
      for (const auto& pair : *atoms) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          detail::config_error("prior.atoms entries must be [value, prob] pairs");
        }
        out.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      return make_discrete(std::move(out));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    detail::config_error(std::string("prior: ") + e.what());
  }
  detail::config_error("prior.kind must be \"gaussian\" or \"discrete\"");
}

inline json quadrature_to_json(const QuadratureConfig& q) {
  return json{{"hermite_nodes", q.hermite_nodes},       {"y_truncation_sigmas", q.y_truncation_sigmas},
              {"beta_grid_points", q.beta_grid_points}, {"beta_floor", q.beta_floor},
              {"simpson_tol", q.simpson_tol},           {"fd_step", q.fd_step}};
}

inline QuadratureConfig quadrature_from_json(const json& j) {
  QuadratureConfig q;
  if (!j.is_object()) detail::config_error("quadrature must be an object");
  detail::optional_field(j, "hermite_nodes", "quadrature", q.hermite_nodes);
  detail::optional_field(j, "y_truncation_sigmas", "quadrature", q.y_truncation_sigmas);
  detail::optional_field(j, "beta_grid_points", "quadrature", q.beta_grid_points);
  detail::optional_field(j, "beta_floor", "quadrature", q.beta_floor);
  detail::optional_field(j, "simpson_tol", "quadrature", q.simpson_tol);
  detail::optional_field(j, "fd_step", "quadrature", q.fd_step);
  try {
    validate(q);
  } catch (const Error& e) {
    detail::config_error(e.what());
  }
  return q;
}

/// Evenly spaced points on [lo, hi], linearly or logarithmically.
inline std::vector<double> make_grid(double lo, double hi, int points, bool log_spacing) {
  std::vector<double> out;
  out.reserve(points);
  for (int k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    out.push_back(log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  if (points > 1) out.back() = hi;
  return out;
}

inline std::vector<double> beta_grid_from_json(const json& j) {
  if (!j.is_object()) detail::config_error("beta_grid must be an object");
  std::vector<double> betas;
  if (const auto values = j.find("values"); values != j.end()) {
    if (!values->is_array()) detail::config_error("beta_grid.values must be an array");
    for (const auto& v : *values) {
      if (!v.is_number()) detail::config_error("beta_grid.values must hold numbers");
      betas.push_back(v.get<double>());
    }
  } else {
    int points = 0;
    detail::optional_field(j, "points", "beta_grid", points);
    if (points < 0) detail::config_error("beta_grid.points must be >= 0");
    if (points > 0) {
      const double lo = detail::number_field(j, "min", "beta_grid");
      const double hi = detail::number_field(j, "max", "beta_grid");
      std::string spacing = "log";
      if (const auto s = j.find("spacing"); s != j.end()) {
        if (!s->is_string()) detail::config_error("beta_grid.spacing must be \"linear\" or \"log\"");
        spacing = s->get<std::string>();
      }
      if (spacing != "linear" && spacing != "log") {
        detail::config_error("beta_grid.spacing must be \"linear\" or \"log\"");
      }
      if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
        detail::config_error("beta_grid needs 0 < min <= max");
      }
      betas = make_grid(lo, hi, points, spacing == "log");
    }
  }
  if (betas.empty()) detail::config_error("beta grid empty");
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) detail::config_error("beta_grid values must be finite and > 0");
  }
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  return betas;
}

inline RunConfig config_from_json(const json& j) {
  if (!j.is_object()) detail::config_error("config must be a JSON object");
  RunConfig cfg;
  const auto prior = j.find("prior");
  if (prior == j.end()) detail::config_error("prior is missing");
  cfg.prior = prior_from_json(*prior);
  const auto grid = j.find("beta_grid");
  if (grid == j.end()) detail::config_error("beta_grid is missing");
  cfg.betas = beta_grid_from_json(*grid);
  if (const auto q = j.find("quadrature"); q != j.end()) cfg.quadrature = quadrature_from_json(*q);
  if (const auto o = j.find("oracle"); o != j.end()) {
    if (!o->is_object()) detail::config_error("oracle must be an object");
    detail::optional_field(*o, "mc_samples", "oracle", cfg.oracle.mc_samples);
    if (const auto seed = o->find("seed"); seed != o->end()) {
      if (!seed->is_number_unsigned()) detail::config_error("oracle.seed must be a non-negative integer");
      cfg.oracle.rng_seed = seed->get<std::uint64_t>();
    }
    if (cfg.oracle.mc_samples != 0 && cfg.oracle.mc_samples < kMinMcSamples) {
      detail::config_error("oracle.mc_samples must be 0 (no oracle check) or >= 100000");
    }
  }
  if (const auto v = j.find("verify"); v != j.end()) {
    if (!v->is_object()) detail::config_error("verify must be an object");
    detail::optional_field(*v, "strict_classical", "verify", cfg.verify.strict_classical);
  }
  for (double b : cfg.betas) {
    if (!(b > cfg.quadrature.beta_floor)) {
      detail::config_error("beta_grid values must exceed quadrature.beta_floor");
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::config_error("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    detail::config_error("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

}  // namespace thermi
