#pragma once

// The work behind `thermi sweep` and `thermi verify`.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "thermi/boltzmann.hpp"
#include "thermi/config.hpp"
#include "thermi/distributions.hpp"
#include "thermi/errors.hpp"
#include "thermi/estimation.hpp"
#include "thermi/reference.hpp"
#include "thermi/report.hpp"
#include "thermi/thermo.hpp"
#include "thermi/version.hpp"

namespace thermi {

struct RouteSet {
  bool thermo = true;
  bool gsv = true;
  bool classical = false;

  friend bool operator==(const RouteSet&, const RouteSet&) = default;
};

/// Parses a comma-separated list drawn from thermo, gsv and classical.
inline RouteSet parse_routes(const std::string& text) {
  RouteSet r{false, false, false};
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "thermo") {
      r.thermo = true;
    } else if (item == "gsv") {
      r.gsv = true;
    } else if (item == "classical") {
      r.classical = true;
    } else {
      throw Error(ErrorCode::ConfigError, "--routes: unknown route \"" + item + "\"");
    }
  }
  if (!r.thermo && !r.gsv && !r.classical) throw Error(ErrorCode::ConfigError, "--routes is empty");
  return r;
}

inline std::vector<std::string> route_names(const RouteSet& r) {
  std::vector<std::string> out;
  if (r.thermo) out.emplace_back("thermo");
  if (r.gsv) out.emplace_back("gsv");
  if (r.classical) out.emplace_back("classical");
  return out;
}

struct SweepOptions {
  RouteSet routes;
  int jobs = 1;
  bool timing = false;
};

/// Observation points spread over the bulk of the output law at beta.
inline std::vector<double> probe_outputs(const InputDistribution& dist, double beta) {
  const double spread = std::sqrt(dist.variance() + 1.0 / beta);
  std::vector<double> ys;
  for (int k = -8; k <= 8; ++k) ys.push_back(dist.mean() + 0.5 * k * spread);
  return ys;
}

/// max over y of |log Z + beta U - S|.
inline double identity_residual_max(const InputDistribution& dist, double beta,
                                    const std::vector<double>& ys, EnergyShift shift = {}) {
  double worst = 0.0;
  for (double y : ys) {
    const ThermalState st = thermal_state(dist, y, beta, shift);
    worst = std::max(worst, std::abs(st.log_partition + beta * st.internal_energy - st.entropy));
  }
  return worst;
}

inline SweepRecord compute_record(const RunConfig& cfg, double beta, const SweepOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto& q = cfg.quadrature;
  SweepRecord r;
  r.beta = beta;
  r.snr_db = 10.0 * std::log10(beta);
  if (opt.routes.thermo) r.mi_thermo_generalized = mi_thermo_generalized(cfg.prior, beta, q).value_nats;
  if (opt.routes.classical) r.mi_thermo_classical = mi_thermo_classical(cfg.prior, beta, q).value_nats;
  if (opt.routes.gsv) r.mi_gsv = mi_gsv(cfg.prior, beta, q).value_nats;
  r.mi_closed_form = mi_closed_form(cfg.prior, beta, q);
  r.mmse = mmse(cfg.prior, beta, q);
  if (beta - q.fd_step > q.beta_floor) r.gsv_residual = gsv_check(cfg.prior, beta, q).residual;
  r.identity_residual_max = identity_residual_max(cfg.prior, beta, probe_outputs(cfg.prior, beta));
  if (opt.timing) {
    r.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

/// Calls work(i) for i in [0, n) on up to `jobs` threads. The first failure
/// by index is rethrown after all threads finish.
template <typename Work>
void parallel_for(std::size_t n, int jobs, Work work) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline SweepReport run_sweep(const RunConfig& cfg, const SweepOptions& opt = {}) {
  if (cfg.betas.empty()) throw Error(ErrorCode::ConfigError, "beta grid empty");
  SweepReport rep;
  rep.header.prior = prior_to_json(cfg.prior);
  rep.header.quadrature = cfg.quadrature;
  rep.header.oracle_seed = cfg.oracle.rng_seed;
  rep.header.mc_samples = cfg.oracle.mc_samples;
  rep.header.routes = route_names(opt.routes);
  rep.header.tool_version = kToolVersion;
  rep.records.resize(cfg.betas.size());
  parallel_for(cfg.betas.size(), opt.jobs,
               [&](std::size_t i) { rep.records[i] = compute_record(cfg, cfg.betas[i], opt); });
  return rep;
}

inline std::string format_summary(const SweepReport& rep) {
  const bool classical = std::any_of(rep.records.begin(), rep.records.end(),
                                     [](const SweepRecord& r) { return r.mi_thermo_classical.has_value(); });
  std::string out;
  char line[192];
  std::snprintf(line, sizeof line, "%12s %9s %14s %14s %14s %14s %12s", "beta", "snr_db", "mi_generalized",
                "mi_gsv", "mi_closed", "mmse", "gsv_resid");
  out += line;
  out += classical ? "   mi_classical\n" : "\n";
  auto cell = [](const std::optional<double>& v) {
    char buf[32];
    if (v) {
      std::snprintf(buf, sizeof buf, "%.10f", *v);
    } else {
      std::snprintf(buf, sizeof buf, "-");
    }
    return std::string(buf);
  };
  for (const auto& r : rep.records) {
    char resid[32] = "-";
    if (r.gsv_residual) std::snprintf(resid, sizeof resid, "%.2e", *r.gsv_residual);
    std::snprintf(line, sizeof line, "%12.6g %9.3f %14s %14s %14s %14.10f %12s", r.beta, r.snr_db,
                  cell(r.mi_thermo_generalized).c_str(), cell(r.mi_gsv).c_str(),
                  cell(r.mi_closed_form).c_str(), r.mmse, resid);
    out += line;
    if (classical) {
      std::snprintf(line, sizeof line, " %14s", cell(r.mi_thermo_classical).c_str());
      out += line;
    }
    out += '\n';
  }
  return out;
}

struct CheckResult {
  std::string name;
  double metric = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

inline constexpr double kGaugeShift = 7.3;

namespace detail {

inline CheckResult make_check(std::string name, double metric, double tol, std::string detail = {}) {
  return {std::move(name), metric, tol, metric < tol, std::move(detail)};
}

/// Largest change in any posterior weight, or in the mean and variance of a
/// Gaussian posterior, when every energy moves by `shift`.
inline double posterior_gauge_shift(const InputDistribution& dist, double y, double beta,
                                    EnergyShift shift) {
  const Posterior a = posterior(dist, y, beta);
  const Posterior b = posterior(dist, y, beta, shift);
  double worst = std::max(std::abs(a.mean - b.mean), std::abs(a.variance - b.variance));
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    worst = std::max(worst, std::abs(a.weights[i].prob - b.weights[i].prob));
  }
  return worst;
}

}  // namespace detail

/// Runs the invariant suite over the configured prior and beta grid.
inline VerifyReport run_verify(const RunConfig& cfg, int jobs = 1) {
  const auto& dist = cfg.prior;
  const auto& q = cfg.quadrature;
  SweepOptions opt;
  opt.routes.classical = cfg.verify.strict_classical;
  opt.jobs = jobs;
  const SweepReport rep = run_sweep(cfg, opt);
  VerifyReport out;

  {
    std::mt19937_64 rng(cfg.oracle.rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double spread = std::sqrt(dist.variance()) + 1.0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double y = dist.mean() + spread * (10.0 * unit(rng) - 5.0);
      const double beta = 1e-2 * std::pow(2e3, unit(rng));
      worst = std::max(worst, identity_residual_max(dist, beta, {y}));
    }
    out.checks.push_back(detail::make_check("identity", worst, 1e-9, "100 random (y, beta) points"));
  }

  {
    const EnergyShift shift{kGaugeShift};
    std::vector<double> worst(cfg.betas.size(), 0.0);
    parallel_for(cfg.betas.size(), jobs, [&](std::size_t i) {
      const double beta = cfg.betas[i];
      double w = 0.0;
      for (double y : probe_outputs(dist, beta)) {
        w = std::max(w, detail::posterior_gauge_shift(dist, y, beta, shift));
      }
      w = std::max(w, std::abs(mi_thermo_generalized(dist, beta, q).value_nats -
                               mi_thermo_generalized(dist, beta, q, shift).value_nats));
      w = std::max(w, std::abs(mi_gsv(dist, beta, q).value_nats - mi_gsv(dist, beta, q, shift).value_nats));
      w = std::max(w, std::abs(mmse(dist, beta, q) - mmse(dist, beta, q, shift)));
      if (cfg.verify.strict_classical) {
        w = std::max(w, std::abs(mi_thermo_classical(dist, beta, q).value_nats -
                                 mi_thermo_classical(dist, beta, q, shift).value_nats));
      }
      worst[i] = w;
    });
    out.checks.push_back(detail::make_check("gauge", *std::max_element(worst.begin(), worst.end()),
                                            1e-10, "energy shift c = 7.3"));
  }

  double route_gap = 0.0;
  double closed_gap = 0.0;
  bool have_closed = false;
  double gsv_worst = 0.0;
  int gsv_points = 0;
  double bound_violation = 0.0;
  double classical_gap = 0.0;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const auto& r = rep.records[i];
    route_gap = std::max(route_gap, std::abs(*r.mi_gsv - *r.mi_thermo_generalized));
    if (r.mi_closed_form) {
      have_closed = true;
      closed_gap = std::max({closed_gap, std::abs(*r.mi_thermo_generalized - *r.mi_closed_form),
                             std::abs(*r.mi_gsv - *r.mi_closed_form)});
    }
    if (r.gsv_residual) {
      gsv_worst = std::max(gsv_worst, std::abs(*r.gsv_residual));
      ++gsv_points;
    }
    bound_violation = std::max({bound_violation, -r.mmse, r.mmse - prior_variance(dist),
                                -*r.mi_thermo_generalized, -*r.mi_gsv});
    if (i > 0) {
      const auto& prev = rep.records[i - 1];
      bound_violation = std::max({bound_violation, *prev.mi_thermo_generalized - *r.mi_thermo_generalized,
                                  *prev.mi_gsv - *r.mi_gsv});
    }
    if (r.mi_thermo_classical) {
      classical_gap = std::max(classical_gap, std::abs(*r.mi_thermo_classical - *r.mi_thermo_generalized));
    }
  }
  out.checks.push_back(detail::make_check("route_agreement", route_gap, 2e-4, "gsv vs thermo_generalized"));
  if (have_closed) {
    out.checks.push_back(detail::make_check("closed_form", closed_gap, 1e-4, "both routes vs closed form"));
  }
  out.checks.push_back(detail::make_check(
      "gsv_check", gsv_worst, 1e-3,
      gsv_points > 0 ? "dI/dbeta vs mmse/2, fd_step " + format_number(q.fd_step)
                     : "no beta above fd_step"));
  out.checks.push_back(detail::make_check("monotone_bounds", std::max(bound_violation, 0.0), 1e-9,
                                          "I nondecreasing, 0 <= mmse <= prior variance"));
  if (cfg.verify.strict_classical) {
    out.checks.push_back(
        detail::make_check("classical_strict", classical_gap, 1e-6, "thermo_classical vs thermo_generalized"));
  }

  if (cfg.oracle.mc_samples > 0) {
    std::vector<double> z(cfg.betas.size(), 0.0);
    for (std::size_t i = 0; i < cfg.betas.size(); ++i) {
      const McEstimate mc = mc_mutual_information(dist, cfg.betas[i], cfg.oracle);
      z[i] = std::abs(mc.estimate - *rep.records[i].mi_thermo_generalized) / mc.std_error;
    }
    out.checks.push_back(detail::make_check("oracle_containment", *std::max_element(z.begin(), z.end()),
                                            4.0, "Monte-Carlo z-score"));
  }
  return out;
}

inline std::string format_verify(const VerifyReport& rep) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%-20s %12s %12s  %-6s %s\n", "check", "metric", "tolerance",
                "status", "detail");
  out += line;
  for (const auto& c : rep.checks) {
    std::snprintf(line, sizeof line, "%-20s %12.3e %12.3e  %-6s %s\n", c.name.c_str(), c.metric,
                  c.tolerance, c.passed ? "PASS" : "FAIL", c.detail.c_str());
    out += line;
  }
  return out;
}

}  // namespace thermi
