#pragma once

// Conditional-mean estimation and the I-MMSE route to mutual information.
//
// The channel is parameterized as Y = X + N(0, 1/snr). The standard form
// Y' = sqrt(snr) X + N(0, 1) is the same experiment with Y' = sqrt(snr) Y,
// so posteriors, MMSE and mutual information coincide between the two.

#include "thermi/boltzmann.hpp"
#include "thermi/distributions.hpp"
#include "thermi/errors.hpp"
#include "thermi/quadrature.hpp"
#include "thermi/thermo.hpp"

namespace thermi {

/// E[X | Y = y] at snr beta; the prior mean at beta = 0.
inline double conditional_mean(const InputDistribution& dist, double y, double beta,
                               EnergyShift shift = {}) {
  return posterior(dist, y, beta, shift).mean;
}

inline double conditional_variance(const InputDistribution& dist, double y, double beta,
                                   EnergyShift shift = {}) {
  return posterior(dist, y, beta, shift).variance;
}

/// mmse(beta) = E_Y{Var(X | Y)}; the prior variance at beta = 0.
inline double mmse(const InputDistribution& dist, double beta, const QuadratureConfig& cfg,
                   EnergyShift shift = {}) {
  validate(cfg);
  detail::require_nonnegative_beta(beta);
  if (beta == 0.0) return prior_variance(dist);
  return expect_over_output(
      dist, beta, [&](double y) { return conditional_variance(dist, y, beta, shift); }, cfg);
}

/// I(beta) = 1/2 int_0^beta mmse(g) dg.
inline MIResult mi_gsv(const InputDistribution& dist, double beta, const QuadratureConfig& cfg,
                       EnergyShift shift = {}) {
  validate(cfg);
  detail::require_nonnegative_beta(beta);
  MIResult r;
  r.beta = beta;
  r.route = Route::GSV;
  if (beta == 0.0) return r;
  r.integral_term =
      0.5 * integrate_beta([&](double g) { return mmse(dist, g, cfg, shift); }, 0.0, beta, cfg,
                           prior_variance(dist));
  r.value_nats = r.integral_term;
  return r;
}

struct GsvCheck {
  double beta = 0.0;
  double lhs_dI_dbeta = 0.0;
  double rhs_half_mmse = 0.0;
  double residual = 0.0;
};

/// dI/dbeta of the generalized thermodynamic route against mmse/2.
inline GsvCheck gsv_check(const InputDistribution& dist, double beta, const QuadratureConfig& cfg) {
  validate(cfg);
  if (!(beta > cfg.fd_step)) throw Error(ErrorCode::InvalidArgument, "gsv_check needs beta > fd_step");
  GsvCheck c;
  c.beta = beta;
  c.lhs_dI_dbeta = central_difference(
      [&](double b) { return mi_thermo_generalized(dist, b, cfg).value_nats; }, beta, cfg.fd_step);
  c.rhs_half_mmse = 0.5 * mmse(dist, beta, cfg);
  c.residual = c.lhs_dI_dbeta - c.rhs_half_mmse;
  return c;
}

}  // namespace thermi
