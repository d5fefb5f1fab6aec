#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "thermi/errors.hpp"

namespace thermi {

/// One support point of a discrete channel input.
struct Atom {
  double value = 0.0;
  double prob = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class PriorKind { DiscreteAtoms, Gaussian };

/// Channel-input prior P(X): either a finite list of atoms or a Gaussian.
///
/// Instances are only produced by make_discrete / make_gaussian and are
/// immutable afterwards, so they can be shared freely between threads.
class InputDistribution {
 public:
  PriorKind kind() const noexcept { return kind_; }
  bool is_discrete() const noexcept { return kind_ == PriorKind::DiscreteAtoms; }
  bool is_gaussian() const noexcept { return kind_ == PriorKind::Gaussian; }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  /// Discrete prior whose masses are all equal; its log-prior energy term
  /// is x-independent and is dropped from the energy.
  bool is_uniform_discrete() const noexcept { return uniform_; }
  /// Discrete prior whose atoms all share the same x^2 (e.g. +-a), so the
  /// x^2/2 energy term is constant over the support and is dropped.
  bool has_constant_square() const noexcept { return constant_square_; }

  friend bool operator==(const InputDistribution&, const InputDistribution&) = default;

 private:
  friend InputDistribution make_discrete(std::vector<Atom> atoms);
  friend InputDistribution make_gaussian(double mean, double variance);

  PriorKind kind_ = PriorKind::Gaussian;
  std::vector<Atom> atoms_;
  double mean_ = 0.0;
  double variance_ = 1.0;
  bool uniform_ = false;
  bool constant_square_ = false;
};

inline InputDistribution make_discrete(std::vector<Atom> atoms) {
  if (atoms.size() < 2) {
    throw Error(ErrorCode::DuplicateAtom, "a discrete prior needs at least 2 distinct atoms");
  }
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value)) {
      throw Error(ErrorCode::InvalidArgument, "atom value must be finite");
    }
    if (!(a.prob > 0.0) || !std::isfinite(a.prob)) {
      throw Error(ErrorCode::NonPositiveProbability,
                  "atom at " + format_number(a.value) + " has non-positive probability");
    }
    total += a.prob;
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (atoms[i].value == atoms[j].value) {
        throw Error(ErrorCode::DuplicateAtom, "atom " + format_number(atoms[i].value) +
                                                  " appears more than once");
      }
    }
  }
  if (std::abs(total - 1.0) >= 1e-9) {
    throw Error(ErrorCode::NotNormalized,
                "probabilities sum to " + format_number(total) + ", expected 1");
  }
  // Left alone when already 1 up to summation rounding, which keeps
  // make_discrete idempotent on its own output.
  if (std::abs(total - 1.0) > 8.0 * static_cast<double>(atoms.size()) * 0x1.0p-52) {
    for (auto& a : atoms) a.prob /= total;
  }

  InputDistribution d;
  d.kind_ = PriorKind::DiscreteAtoms;
  d.atoms_ = std::move(atoms);
  const double p0 = d.atoms_.front().prob;
  const double sq0 = d.atoms_.front().value * d.atoms_.front().value;
  d.uniform_ = std::all_of(d.atoms_.begin(), d.atoms_.end(),
                           [&](const Atom& a) { return std::abs(a.prob - p0) <= 1e-12 * p0; });
  d.constant_square_ = std::all_of(d.atoms_.begin(), d.atoms_.end(),
                                   [&](const Atom& a) { return a.value * a.value == sq0; });
  double m = 0.0;
  for (const auto& a : d.atoms_) m += a.prob * a.value;
  double v = 0.0;
  for (const auto& a : d.atoms_) v += a.prob * (a.value - m) * (a.value - m);
  d.mean_ = m;
  d.variance_ = v;
  return d;
}

inline InputDistribution make_gaussian(double mean, double variance) {
  if (!std::isfinite(mean)) throw Error(ErrorCode::InvalidArgument, "mean must be finite");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw Error(ErrorCode::NonPositiveVariance, "variance must be positive and finite");
  }
  InputDistribution d;
  d.kind_ = PriorKind::Gaussian;
  d.mean_ = mean;
  d.variance_ = variance;
  return d;
}

/// The +-1 equiprobable input.
inline InputDistribution bernoulli_half() { return make_discrete({{-1.0, 0.5}, {1.0, 0.5}}); }

inline double prior_mean(const InputDistribution& dist) noexcept { return dist.mean(); }
inline double prior_variance(const InputDistribution& dist) noexcept { return dist.variance(); }

inline double second_moment(const InputDistribution& dist) noexcept {
  if (dist.is_gaussian()) return dist.mean() * dist.mean() + dist.variance();
  double s = 0.0;
  for (const auto& a : dist.atoms()) s += a.prob * a.value * a.value;
  return s;
}

/// Natural-log mass (discrete) or density (Gaussian) of the prior at x.
inline double prior_log_prob(const InputDistribution& dist, double x) {
  if (dist.is_gaussian()) {
    const double d = x - dist.mean();
    return -0.5 * std::log(2.0 * std::numbers::pi * dist.variance()) -
           d * d / (2.0 * dist.variance());
  }
  for (const auto& a : dist.atoms()) {
    if (a.value == x) return std::log(a.prob);
  }
  throw Error(ErrorCode::AtomNotFound, format_number(x) + " is not an atom of the prior");
}

/// Shannon entropy in nats (discrete) or differential entropy (Gaussian).
inline double prior_entropy(const InputDistribution& dist) noexcept {
  if (dist.is_gaussian()) {
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * dist.variance());
  }
  if (dist.is_uniform_discrete()) return std::log(static_cast<double>(dist.atoms().size()));
  double h = 0.0;
  for (const auto& a : dist.atoms()) h -= a.prob * std::log(a.prob);
  return h;
}

}  // namespace thermi
