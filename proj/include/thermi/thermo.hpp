#pragma once

// Mutual information and entropies assembled from thermodynamic quantities.
//
// Both thermodynamic routes use the integration-by-parts form
//
//     I(beta) = -[g E_Y{U(Y; g)}]_0^beta + E_Y{ int_0^beta K(Y; g) dg }
//
// where K = U for the classical second law and K = U + g E_{X|Y}{dE/dg} for
// the generalized law. E_Y is always taken under the output law at the
// target beta, applied to the whole inner integral.

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>

#include "thermi/boltzmann.hpp"
#include "thermi/distributions.hpp"
#include "thermi/errors.hpp"
#include "thermi/quadrature.hpp"

namespace thermi {

enum class Route { ThermoClassical, ThermoGeneralized, GSV, ClosedForm };

constexpr std::string_view to_string(Route r) noexcept {
  switch (r) {
    case Route::ThermoClassical: return "thermo_classical";
    case Route::ThermoGeneralized: return "thermo_generalized";
    case Route::GSV: return "gsv";
    case Route::ClosedForm: return "closed_form";
  }
  return "unknown";
}

struct MIResult {
  double beta = 0.0;
  double value_nats = 0.0;
  Route route = Route::ThermoGeneralized;
  double boundary_term = 0.0;
  double integral_term = 0.0;
  /// Set when the route is known not to apply to this prior.
  std::optional<ErrorCode> warning;
};

/// p(Y = y) at inverse temperature beta.
inline double output_density(const InputDistribution& dist, double y, double beta) {
  detail::require_positive_beta(beta);
  auto normal = [](double v, double mean, double var) {
    const double d = v - mean;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
  };
  if (dist.is_gaussian()) return normal(y, dist.mean(), dist.variance() + 1.0 / beta);
  double p = 0.0;
  for (const auto& a : dist.atoms()) p += a.prob * normal(y, a.value, 1.0 / beta);
  return p;
}

/// E_Y{f(Y)} under the output law at beta. A discrete prior gives a Gaussian
/// mixture, integrated one component at a time.
template <typename F>
double expect_over_output(const InputDistribution& dist, double beta, F&& f,
                          const QuadratureConfig& cfg) {
  detail::require_positive_beta(beta);
  if (dist.is_gaussian()) {
    return integrate_gaussian_weight(f, dist.mean(), dist.variance() + 1.0 / beta, cfg);
  }
  double total = 0.0;
  for (const auto& a : dist.atoms()) {
    total += a.prob * integrate_gaussian_weight(f, a.value, 1.0 / beta, cfg);
  }
  return total;
}

namespace detail {

inline void require_target_beta(double beta, const QuadratureConfig& cfg) {
  validate(cfg);
  require_positive_beta(beta);
  if (!(beta > cfg.beta_floor)) {
    throw Error(ErrorCode::InvalidArgument, "beta must exceed quadrature.beta_floor");
  }
}

/// g * E_Y{U(Y; g)} with Y distributed as the output at `beta`.
inline double scaled_output_energy(const InputDistribution& dist, double beta, double g,
                                   const QuadratureConfig& cfg, EnergyShift shift) {
  return g * expect_over_output(
                 dist, beta, [&](double y) { return internal_energy(dist, y, g, shift); }, cfg);
}

/// g * E_Y{U} as g -> 0 by Richardson extrapolation over beta_floor and
/// 2 beta_floor (the term is linear in g near 0).
inline double scaled_output_energy_at_zero(const InputDistribution& dist, double beta,
                                           const QuadratureConfig& cfg, EnergyShift shift) {
  const double h = cfg.beta_floor;
  return 2.0 * scaled_output_energy(dist, beta, h, cfg, shift) -
         scaled_output_energy(dist, beta, 2.0 * h, cfg, shift);
}

}  // namespace detail

/// Lower boundary value lim_{g->0} g E_Y{U(Y; g)} used by both routes.
inline double boundary_limit_at_zero(const InputDistribution& dist, double beta,
                                     const QuadratureConfig& cfg, EnergyShift shift = {}) {
  detail::require_target_beta(beta, cfg);
  return detail::scaled_output_energy_at_zero(dist, beta, cfg, shift);
}

/// The combined generalized-law integrand U + g E_{X|Y}{dE/dg} at (y, g).
/// The -log P(x)/g part of U and g dE/dg cancel term by term, so the sum is
/// taken as the posterior mean of the remaining energy terms; adding the two
/// separately loses ~eps/g to cancellation near g = 0.
inline double generalized_integrand(const InputDistribution& dist, double y, double g,
                                    EnergyShift shift = {}) {
  return thermal_state(dist, y, g, shift).direct_energy_mean;
}

/// Mutual information from the classical second law (energy assumed
/// beta-independent). Only correct for equiprobable discrete priors; other
/// priors get a NonEquiprobablePrior warning and a wrong answer. When U has
/// no finite limit at g = 0 both the boundary and the integral are cut at
/// beta_floor.
inline MIResult mi_thermo_classical(const InputDistribution& dist, double beta,
                                    const QuadratureConfig& cfg, EnergyShift shift = {}) {
  detail::require_target_beta(beta, cfg);
  MIResult r;
  r.beta = beta;
  r.route = Route::ThermoClassical;
  const bool finite_at_zero = !detail::has_prior_energy(dist);
  if (!dist.is_uniform_discrete()) r.warning = ErrorCode::NonEquiprobablePrior;

  const double upper = detail::scaled_output_energy(dist, beta, beta, cfg, shift);
  const double lower = finite_at_zero
                           ? detail::scaled_output_energy_at_zero(dist, beta, cfg, shift)
                           : detail::scaled_output_energy(dist, beta, cfg.beta_floor, cfg, shift);
  r.boundary_term = -(upper - lower);
  r.integral_term = expect_over_output(
      dist, beta,
      [&](double y) {
        std::optional<double> at_zero;
        if (finite_at_zero) at_zero = direct_energy_prior_mean(dist, y, shift);
        return integrate_beta([&](double g) { return internal_energy(dist, y, g, shift); }, 0.0,
                              beta, cfg, at_zero);
      },
      cfg);
  r.value_nats = r.boundary_term + r.integral_term;
  return r;
}

/// Mutual information from the generalized second law, valid for any prior.
inline MIResult mi_thermo_generalized(const InputDistribution& dist, double beta,
                                      const QuadratureConfig& cfg, EnergyShift shift = {}) {
  detail::require_target_beta(beta, cfg);
  MIResult r;
  r.beta = beta;
  r.route = Route::ThermoGeneralized;
  const double upper = detail::scaled_output_energy(dist, beta, beta, cfg, shift);
  const double lower = detail::scaled_output_energy_at_zero(dist, beta, cfg, shift);
  r.boundary_term = -(upper - lower);
  r.integral_term = expect_over_output(
      dist, beta,
      [&](double y) {
        return integrate_beta([&](double g) { return generalized_integrand(dist, y, g, shift); },
                              0.0, beta, cfg, direct_energy_prior_mean(dist, y, shift));
      },
      cfg);
  r.value_nats = r.boundary_term + r.integral_term;
  return r;
}

/// H(X | Y; beta) = E_Y{S(X | Y = y; beta)}.
inline double conditional_entropy(const InputDistribution& dist, double beta,
                                  const QuadratureConfig& cfg) {
  validate(cfg);
  return expect_over_output(
      dist, beta, [&](double y) { return posterior_entropy(dist, y, beta); }, cfg);
}

/// Posterior entropy at y rebuilt from the heat capacity,
///     S(beta) = S0 - int_beta^inf g C_V(g) dg,
/// which holds only when the energy does not depend on beta. S0 defaults to
/// the log-degeneracy of the ground state at y.
inline double entropy_via_heat_capacity(const InputDistribution& dist, double y, double beta,
                                        const QuadratureConfig& cfg,
                                        std::optional<double> residual_entropy = std::nullopt) {
  validate(cfg);
  if (!dist.is_uniform_discrete()) {
    throw Error(ErrorCode::NonEquiprobablePrior,
                "the classical entropy integral needs an equiprobable discrete prior");
  }
  if (!(beta > cfg.fd_step)) {
    throw Error(ErrorCode::InvalidArgument, "entropy_via_heat_capacity needs beta > fd_step");
  }
  const double s0 = residual_entropy.value_or(ground_state_entropy(dist, y));
  const double tail = integrate_beta_to_infinity(
      [&](double g) { return g * heat_capacity(dist, y, g, cfg); }, beta, cfg);
  return s0 - tail;
}

}  // namespace thermi
