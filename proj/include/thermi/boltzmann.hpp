#pragma once

// The Gaussian channel Y = X + N(0, 1/beta) read as a canonical ensemble.
//
// The input value x is the microstate and, for an observation y, its energy
// is
//
//     E(x | y; beta) = -x y + x^2 / 2 - log P(x) / beta + shift
//
// with every x-independent term dropped: x^2/2 goes when all atoms share the
// same |x|, -log P(x)/beta goes for equiprobable atoms, and for a Gaussian
// prior only the quadratic part of -log p(x) is kept. `shift` is an explicit
// gauge constant (zero by default) used to check that observables do not
// depend on the energy origin.
//
// The Boltzmann law exp(-beta E) / Z then coincides with the posterior of X
// given Y = y.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "thermi/distributions.hpp"
#include "thermi/errors.hpp"
#include "thermi/quadrature.hpp"

namespace thermi {

/// Additive constant applied to every energy level.
struct EnergyShift {
  double value = 0.0;
};

/// Inverse temperature; equal to the channel snr.
class ChannelPoint {
 public:
  explicit ChannelPoint(double beta) : beta_(beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
      throw Error(ErrorCode::InvalidArgument, "beta must be finite and >= 0");
    }
  }
  double beta() const noexcept { return beta_; }
  double temperature() const noexcept {
    return beta_ > 0.0 ? 1.0 / beta_ : std::numeric_limits<double>::infinity();
  }

 private:
  double beta_;
};

/// Boltzmann posterior of X given Y = y at inverse temperature beta.
struct Posterior {
  double beta = 0.0;
  double y = 0.0;
  double log_partition = 0.0;
  /// Posterior masses for a discrete prior; empty for a Gaussian prior.
  std::vector<Atom> weights;
  double mean = 0.0;
  double variance = 0.0;

  bool is_discrete() const noexcept { return !weights.empty(); }
};

namespace detail {

inline void require_nonnegative_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be finite and >= 0");
  }
}

inline void require_positive_beta(double beta) {
  require_nonnegative_beta(beta);
  if (beta == 0.0) throw Error(ErrorCode::BetaZero, "operation requires beta > 0");
}

/// Energy terms that do not scale with 1/beta.
inline double direct_energy(const InputDistribution& dist, double x, double y) noexcept {
  double e = -x * y;
  if (dist.is_gaussian() || !dist.has_constant_square()) e += 0.5 * x * x;
  return e;
}

/// Coefficient of 1/beta in the energy: -log P(x) up to x-independent terms.
inline double prior_energy(const InputDistribution& dist, const Atom& atom) {
  return dist.is_uniform_discrete() ? 0.0 : -std::log(atom.prob);
}

inline double gaussian_prior_energy(const InputDistribution& dist, double x) noexcept {
  return (x * x - 2.0 * dist.mean() * x) / (2.0 * dist.variance());
}

inline bool has_prior_energy(const InputDistribution& dist) noexcept {
  return dist.is_gaussian() || !dist.is_uniform_discrete();
}

inline const Atom& find_atom(const InputDistribution& dist, double x) {
  for (const auto& a : dist.atoms()) {
    if (a.value == x) return a;
  }
  throw Error(ErrorCode::AtomNotFound, format_number(x) + " is not an atom of the prior");
}

}  // namespace detail

/// Energy of microstate x for observation y at inverse temperature beta.
inline double energy(const InputDistribution& dist, double x, double y, double beta,
                     EnergyShift shift = {}) {
  detail::require_nonnegative_beta(beta);
  if (dist.is_gaussian()) {
    detail::require_positive_beta(beta);
    return detail::direct_energy(dist, x, y) + detail::gaussian_prior_energy(dist, x) / beta +
           shift.value;
  }
  const Atom& atom = detail::find_atom(dist, x);
  double e = detail::direct_energy(dist, x, y) + shift.value;
  if (detail::has_prior_energy(dist)) {
    detail::require_positive_beta(beta);
    e += detail::prior_energy(dist, atom) / beta;
  }
  return e;
}

/// d energy / d beta at fixed x and y.
inline double energy_dbeta(const InputDistribution& dist, double x, double y, double beta) {
  (void)y;
  detail::require_positive_beta(beta);
  if (dist.is_gaussian()) return -detail::gaussian_prior_energy(dist, x) / (beta * beta);
  const Atom& atom = detail::find_atom(dist, x);
  return -detail::prior_energy(dist, atom) / (beta * beta);
}

/// Boltzmann posterior; beta = 0 returns the prior with log Z = 0.
inline Posterior posterior(const InputDistribution& dist, double y, double beta,
                           EnergyShift shift = {}) {
  detail::require_nonnegative_beta(beta);
  Posterior post;
  post.beta = beta;
  post.y = y;
  if (beta == 0.0) {
    post.mean = dist.mean();
    post.variance = dist.variance();
    if (dist.is_discrete()) post.weights = dist.atoms();
    return post;
  }
  if (dist.is_gaussian()) {
    // -beta E = -a x^2 / 2 + b x - beta shift
    const double a = beta + 1.0 / dist.variance();
    const double b = beta * y + dist.mean() / dist.variance();
    post.mean = b / a;
    post.variance = 1.0 / a;
    post.log_partition = 0.5 * std::log(2.0 * std::numbers::pi / a) + b * b / (2.0 * a) -
                         beta * shift.value;
    return post;
  }
  const auto& atoms = dist.atoms();
  std::vector<double> log_w(atoms.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double e = detail::direct_energy(dist, atoms[i].value, y) + shift.value;
    log_w[i] = -beta * e - detail::prior_energy(dist, atoms[i]);
    top = std::max(top, log_w[i]);
  }
  double z = 0.0;
  for (double lw : log_w) z += std::exp(lw - top);
  post.log_partition = top + std::log(z);
  post.weights.resize(atoms.size());
  double m = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    post.weights[i] = {atoms[i].value, std::exp(log_w[i] - post.log_partition)};
    m += post.weights[i].prob * atoms[i].value;
  }
  double v = 0.0;
  for (const auto& w : post.weights) v += w.prob * (w.value - m) * (w.value - m);
  post.mean = m;
  post.variance = v;
  return post;
}

/// Internal energy, log partition, entropy and mean dE/dbeta from one
/// posterior evaluation.
struct ThermalState {
  double log_partition = 0.0;
  double internal_energy = 0.0;
  double entropy = 0.0;
  double mean_energy_dbeta = 0.0;
  /// Posterior mean of the beta-independent energy terms (plus the shift),
  /// which is U + beta E[dE/dbeta] with the 1/beta parts cancelled exactly.
  double direct_energy_mean = 0.0;
};

namespace detail {

inline double entropy_of(const InputDistribution& dist, const Posterior& post) {
  if (!post.is_discrete()) {
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * post.variance);
  }
  if (post.beta == 0.0) return prior_entropy(dist);
  double s = 0.0;
  for (const auto& w : post.weights) {
    if (w.prob > 0.0) s -= w.prob * std::log(w.prob);
  }
  return s;
}

}  // namespace detail

inline ThermalState thermal_state(const InputDistribution& dist, double y, double beta,
                                  EnergyShift shift = {}) {
  detail::require_positive_beta(beta);
  const Posterior post = posterior(dist, y, beta, shift);
  ThermalState st;
  st.log_partition = post.log_partition;
  st.entropy = detail::entropy_of(dist, post);
  if (dist.is_gaussian()) {
    const double mu = post.mean;
    const double second = mu * mu + post.variance;
    const double quad = (second - 2.0 * dist.mean() * mu) / (2.0 * dist.variance());
    st.direct_energy_mean = -y * mu + 0.5 * second + shift.value;
    st.internal_energy = st.direct_energy_mean + quad / beta;
    st.mean_energy_dbeta = -quad / (beta * beta);
    return st;
  }
  const auto& atoms = dist.atoms();
  double u = 0.0;
  double prior_term = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double w = post.weights[i].prob;
    u += w * detail::direct_energy(dist, atoms[i].value, y);
    prior_term += w * detail::prior_energy(dist, atoms[i]);
  }
  st.direct_energy_mean = u + shift.value;
  st.internal_energy = st.direct_energy_mean + prior_term / beta;
  st.mean_energy_dbeta = -prior_term / (beta * beta);
  return st;
}

/// U(y; beta): posterior average of the energy.
inline double internal_energy(const InputDistribution& dist, double y, double beta,
                              EnergyShift shift = {}) {
  return thermal_state(dist, y, beta, shift).internal_energy;
}

/// Posterior average of d energy / d beta.
inline double mean_energy_dbeta(const InputDistribution& dist, double y, double beta) {
  return thermal_state(dist, y, beta).mean_energy_dbeta;
}

/// S(X | Y = y; beta) in nats; differential entropy for a Gaussian prior.
inline double posterior_entropy(const InputDistribution& dist, double y, double beta) {
  return detail::entropy_of(dist, posterior(dist, y, beta));
}

inline double log_partition(const InputDistribution& dist, double y, double beta,
                            EnergyShift shift = {}) {
  detail::require_positive_beta(beta);
  return posterior(dist, y, beta, shift).log_partition;
}

/// dU/dbeta by central difference with step cfg.fd_step.
inline double heat_capacity(const InputDistribution& dist, double y, double beta,
                            const QuadratureConfig& cfg, EnergyShift shift = {}) {
  if (!(beta > cfg.fd_step)) {
    throw Error(ErrorCode::InvalidArgument, "heat_capacity needs beta > fd_step");
  }
  return central_difference(
      [&](double b) { return internal_energy(dist, y, b, shift); }, beta, cfg.fd_step);
}

/// Finite beta -> 0 limit of U + beta E[dE/dbeta]: the prior average of the
/// beta-independent energy terms. For equiprobable atoms this is also U(y; 0).
inline double direct_energy_prior_mean(const InputDistribution& dist, double y,
                                       EnergyShift shift = {}) noexcept {
  if (dist.is_gaussian()) {
    return -y * dist.mean() + 0.5 * second_moment(dist) + shift.value;
  }
  double u = 0.0;
  for (const auto& a : dist.atoms()) u += a.prob * detail::direct_energy(dist, a.value, y);
  return u + shift.value;
}

/// log of the number of atoms sharing the lowest beta-independent energy at
/// y; the entropy left in the posterior as beta -> infinity.
inline double ground_state_entropy(const InputDistribution& dist, double y) {
  if (!dist.is_discrete()) {
    throw Error(ErrorCode::InvalidArgument, "ground state entropy needs a discrete prior");
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& a : dist.atoms()) lowest = std::min(lowest, detail::direct_energy(dist, a.value, y));
  const double slack = 1e-12 * std::max(1.0, std::abs(lowest));
  int count = 0;
  for (const auto& a : dist.atoms()) {
    if (detail::direct_energy(dist, a.value, y) <= lowest + slack) ++count;
  }
  return std::log(static_cast<double>(count));
}

}  // namespace thermi
