#pragma once

// Deterministic one-dimensional integration primitives.
//
// Expectations over the channel output use Gauss-Hermite rules refined by
// node doubling; if the largest rule still disagrees with its predecessor
// the integral is redone by adaptive Simpson over a truncated window. Integrals over the
// inverse-temperature axis use adaptive Simpson started from a uniform panel
// grid. All node placements are fixed, so repeated runs are bit-identical.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "thermi/errors.hpp"

namespace thermi {

struct QuadratureConfig {
  int hermite_nodes = 64;
  double y_truncation_sigmas = 10.0;
  int beta_grid_points = 64;
  double beta_floor = 1e-6;
  double simpson_tol = 1e-10;
  double fd_step = 1e-3;

  friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

inline void validate(const QuadratureConfig& cfg) {
  auto bad = [](const char* field, const std::string& why) {
    throw Error(ErrorCode::InvalidArgument, std::string("quadrature.") + field + " " + why);
  };
  if (cfg.hermite_nodes < 16) bad("hermite_nodes", "must be >= 16");
  if (cfg.hermite_nodes > 256) bad("hermite_nodes", "must be <= 256");
  if (!(cfg.y_truncation_sigmas > 0.0)) bad("y_truncation_sigmas", "must be > 0");
  if (cfg.beta_grid_points < 64) bad("beta_grid_points", "must be >= 64");
  if (!(cfg.beta_floor > 0.0)) bad("beta_floor", "must be > 0");
  if (!(cfg.simpson_tol > 0.0)) bad("simpson_tol", "must be > 0");
  if (!(cfg.fd_step > 0.0 && cfg.fd_step < 0.1)) bad("fd_step", "must lie in (0, 0.1)");
}

/// Nodes and weights for the weight function exp(-x^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Golub-Welsch eigenvalues of the Jacobi matrix give the root estimates;
// Newton steps on the orthonormal recurrence then polish each root and yield
// weights that stay accurate in relative terms far into the tails.
inline GaussHermiteRule compute_gauss_hermite(int n) {
  constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
  constexpr int kMaxIter = 20;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ToleranceNotReached,
                "Jacobi eigenvalue solve failed for n=" + std::to_string(n));
  }
  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = solver.eigenvalues()[i];
    double pp = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = kPiM4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / (pp * pp);
  }
  // Exact symmetry about zero.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[n - 1 - i] + rule.weights[i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached Gauss-Hermite rule; rules are computed once per node count.
inline std::shared_ptr<const GaussHermiteRule> gauss_hermite_rule(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GaussHermiteRule>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto rule = std::make_shared<const GaussHermiteRule>(detail::compute_gauss_hermite(n));
  cache.emplace(n, rule);
  return rule;
}

namespace detail {

template <typename F>
double checked_eval(F& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteIntegrand,
                "integrand is not finite at " + format_number(x));
  }
  return v;
}

template <typename F>
struct SimpsonState {
  F& f;
  int max_depth;
  bool converged = true;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = checked_eval(f, lm);
    const double frm = checked_eval(f, rm);
    const double h = (b - a) / 12.0;
    const double left = h * (fa + 4.0 * flm + fm);
    const double right = h * (fm + 4.0 * frm + fb);
    const double both = left + right;
    const double delta = both - whole;
    // Rounding floor: a few ulps of the panel value, inflated by the relative
    // rounding error of the panel width once it is narrow against |a|.
    const double width_rounding = std::max(1.0, std::max(std::abs(a), std::abs(b)) / (b - a));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(left) + std::abs(right)) * width_rounding;
    if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= floor) return both + delta / 15.0;
    if (depth >= max_depth) {
      converged = false;
      return both + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

/// Adaptive Simpson on [a, b] started from `panels` uniform panels, with the
/// absolute tolerance shared out in proportion to panel width.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int panels, int max_depth = 50) {
  SimpsonState<std::remove_reference_t<F>> state{f, max_depth};
  const double width = (b - a) / panels;
  double total = 0.0;
  double fa = checked_eval(f, a);
  for (int k = 0; k < panels; ++k) {
    const double lo = a + width * k;
    const double hi = (k + 1 == panels) ? b : a + width * (k + 1);
    const double mid = 0.5 * (lo + hi);
    const double fm = checked_eval(f, mid);
    const double fb = checked_eval(f, hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += state.recurse(lo, hi, fa, fm, fb, whole, tol / panels, 0);
    fa = fb;
  }
  if (!state.converged) {
    throw Error(ErrorCode::ToleranceNotReached,
                "adaptive Simpson did not reach tolerance on [" + format_number(a) + ", " +
                    format_number(b) + "]");
  }
  return total;
}

/// `abs_sum`, when given, receives the same sum taken over |f|.
template <typename F>
double gauss_hermite_sum(F& f, const GaussHermiteRule& rule, double mean, double scale,
                         double* abs_sum = nullptr) {
  // Mirror nodes are paired so that odd integrands about `mean` cancel.
  const std::size_t n = rule.nodes.size();
  double s = 0.0;
  double a = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double offset = scale * rule.nodes[n - 1 - i];
    const double lo = checked_eval(f, mean - offset);
    const double hi = checked_eval(f, mean + offset);
    s += rule.weights[i] * (lo + hi);
    a += rule.weights[i] * (std::abs(lo) + std::abs(hi));
  }
  if (n % 2) {
    const double mid = checked_eval(f, mean);
    s += rule.weights[n / 2] * mid;
    a += rule.weights[n / 2] * std::abs(mid);
  }
  if (abs_sum) *abs_sum = a / std::sqrt(std::numbers::pi);
  return s / std::sqrt(std::numbers::pi);
}

}  // namespace detail

/// Adaptive Simpson version of integrate_gaussian_weight over the window
/// mean +- y_truncation_sigmas standard deviations.
template <typename F>
double integrate_gaussian_weight_simpson(F&& f, double mean, double variance,
                                         const QuadratureConfig& cfg) {
  const double sigma = std::sqrt(variance);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
  auto weighted = [&](double y) {
    const double d = y - mean;
    return f(y) * norm * std::exp(-d * d / (2.0 * variance));
  };
  const double half = cfg.y_truncation_sigmas * sigma;
  return detail::adaptive_simpson(weighted, mean - half, mean + half, cfg.simpson_tol,
                                  cfg.beta_grid_points);
}

/// Largest Gauss-Hermite rule used; the Newton recurrence overflows beyond.
inline constexpr int kMaxHermiteNodes = 512;

/// Integral of f(y) against the N(mean, variance) density.
///
/// Gauss-Hermite rules with n, 2n, 4n, ... nodes are applied until two
/// successive results agree within simpson_tol, scaled by |I - f(mean)| once
/// that exceeds 1, plus a rounding allowance of a few ulps of E|f|. Adding a
/// constant to f therefore leaves the stopping rule unchanged. If
/// kMaxHermiteNodes is reached first, adaptive Simpson over
/// mean +- y_truncation_sigmas standard deviations takes over.
template <typename F>
double integrate_gaussian_weight(F&& f, double mean, double variance,
                                 const QuadratureConfig& cfg) {
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw Error(ErrorCode::InvalidArgument, "Gaussian weight needs finite mean and variance > 0");
  }
  const double scale = std::sqrt(2.0 * variance);
  const double center = detail::checked_eval(f, mean);
  double previous = detail::gauss_hermite_sum(f, *gauss_hermite_rule(cfg.hermite_nodes), mean, scale);
  for (int n = 2 * cfg.hermite_nodes; n <= kMaxHermiteNodes; n *= 2) {
    double abs_sum = 0.0;
    const double current = detail::gauss_hermite_sum(f, *gauss_hermite_rule(n), mean, scale, &abs_sum);
    const double tol = cfg.simpson_tol * std::max(1.0, std::abs(current - center)) +
                       64.0 * std::numeric_limits<double>::epsilon() * abs_sum;
    if (std::abs(current - previous) <= tol) return current;
    previous = current;
  }
  return integrate_gaussian_weight_simpson(f, mean, variance, cfg);
}

/// Integral of g over [beta_lo, beta_hi] on the inverse-temperature axis.
///
/// When beta_lo is 0 the adaptive part starts at cfg.beta_floor. The sliver
/// [0, beta_floor] is added as one trapezoid panel only when the caller
/// supplies the finite limit of g at 0 in `value_at_zero`; otherwise it is
/// omitted and [beta_floor, beta_hi] is integrated in log(beta).
template <typename G>
double integrate_beta(G&& g, double beta_lo, double beta_hi, const QuadratureConfig& cfg,
                      std::optional<double> value_at_zero = std::nullopt) {
  if (!(beta_lo >= 0.0) || !(beta_hi > beta_lo) || !std::isfinite(beta_hi)) {
    throw Error(ErrorCode::InvalidArgument, "integrate_beta needs 0 <= beta_lo < beta_hi");
  }
  if (beta_lo > 0.0) {
    return detail::adaptive_simpson(g, beta_lo, beta_hi, cfg.simpson_tol, cfg.beta_grid_points);
  }
  if (!(beta_hi > cfg.beta_floor)) {
    throw Error(ErrorCode::InvalidArgument,
                "target beta " + format_number(beta_hi) + " must exceed beta_floor");
  }
  if (!value_at_zero) {
    // g ~ c/beta near the floor; in t = log(beta) the integrand g(e^t) e^t is smooth.
    return detail::adaptive_simpson(
        [&](double t) {
          const double b = std::exp(t);
          return detail::checked_eval(g, b) * b;
        },
        std::log(cfg.beta_floor), std::log(beta_hi), cfg.simpson_tol, cfg.beta_grid_points);
  }
  double total = detail::adaptive_simpson(g, cfg.beta_floor, beta_hi, cfg.simpson_tol,
                                          cfg.beta_grid_points);
  {
    if (!std::isfinite(*value_at_zero)) {
      throw Error(ErrorCode::NonFiniteIntegrand, "limit at beta = 0 is not finite");
    }
    total += 0.5 * cfg.beta_floor * (*value_at_zero + detail::checked_eval(g, cfg.beta_floor));
  }
  return total;
}

/// Integral of g over [beta_lo, infinity), truncated once |g| drops below
/// simpson_tol and doubling the cutoff changes the result by less than 1e-8.
template <typename G>
double integrate_beta_to_infinity(G&& g, double beta_lo, const QuadratureConfig& cfg) {
  if (!(beta_lo > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "improper integral needs beta_lo > 0");
  }
  constexpr double kMaxCutoff = 1e8;
  double hi = beta_lo + std::max(1.0, beta_lo);
  while (std::abs(detail::checked_eval(g, hi)) > cfg.simpson_tol && hi < kMaxCutoff) hi *= 2.0;
  double total = integrate_beta(g, beta_lo, hi, cfg);
  while (hi < kMaxCutoff) {
    const double extra = integrate_beta(g, hi, 2.0 * hi, cfg);
    total += extra;
    hi *= 2.0;
    if (std::abs(extra) < 1e-8) return total;
  }
  throw Error(ErrorCode::ToleranceNotReached, "improper integral did not settle");
}

/// Symmetric difference quotient (h(at+step) - h(at-step)) / (2 step).
template <typename H>
double central_difference(H&& h, double at, double step) {
  if (!(step > 0.0) || !(at - step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "central_difference needs step > 0 and at - step > 0");
  }
  const double up = h(at + step);
  const double down = h(at - step);
  const double d = (up - down) / (2.0 * step);
  if (!std::isfinite(d)) {
    throw Error(ErrorCode::NonFiniteValue, "difference quotient at " + format_number(at));
  }
  return d;
}

}  // namespace thermi
