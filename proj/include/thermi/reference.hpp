#pragma once

// Closed forms and Monte-Carlo oracles for validating the integral routes.
//
// Random numbers come from std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Uniforms take the top 53 bits; normals use the
// Box-Muller transform. Work is split into kStreams streams with seeds
// derived by splitmix64, and the per-stream moments are merged pairwise in
// stream order, so results do not depend on how many threads run them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "thermi/boltzmann.hpp"
#include "thermi/distributions.hpp"
#include "thermi/errors.hpp"
#include "thermi/quadrature.hpp"

namespace thermi {

/// I(beta) for the equiprobable +-1 input:
///     beta - E_Z{log cosh(beta - sqrt(beta) Z)},  Z ~ N(0, 1).
inline double mi_bernoulli_closed(double beta, const QuadratureConfig& cfg = {}) {
  detail::require_nonnegative_beta(beta);
  if (beta == 0.0) return 0.0;
  const double root = std::sqrt(beta);
  auto log_cosh = [](double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
  };
  return beta -
         integrate_gaussian_weight([&](double z) { return log_cosh(beta - root * z); }, 0.0, 1.0,
                                   cfg);
}

/// Gaussian-input capacity 1/2 log(1 + beta variance); unit variance by
/// default.
inline double mi_gaussian_closed(double beta, double variance = 1.0) {
  detail::require_nonnegative_beta(beta);
  return 0.5 * std::log1p(beta * variance);
}

/// Closed-form I(beta) when one is known for the prior: any Gaussian, or two
/// equiprobable atoms (a shifted and scaled +-1 input).
inline std::optional<double> mi_closed_form(const InputDistribution& dist, double beta,
                                            const QuadratureConfig& cfg = {}) {
  if (dist.is_gaussian()) return mi_gaussian_closed(beta, dist.variance());
  if (dist.atoms().size() == 2 && dist.is_uniform_discrete()) {
    const double half_gap = 0.5 * (dist.atoms()[1].value - dist.atoms()[0].value);
    return mi_bernoulli_closed(beta * half_gap * half_gap, cfg);
  }
  return std::nullopt;
}

inline constexpr std::int64_t kMinMcSamples = 100'000;

struct OracleConfig {
  std::int64_t mc_samples = 1'000'000;
  std::uint64_t rng_seed = 0x5EED0F7E12A7ULL;

  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr int kStreams = 16;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
};

inline Moments merge(const Moments& a, const Moments& b) noexcept {
  if (a.n == 0.0) return b;
  if (b.n == 0.0) return a;
  Moments out;
  out.n = a.n + b.n;
  const double d = b.mean - a.mean;
  out.mean = a.mean + d * b.n / out.n;
  out.m2 = a.m2 + b.m2 + d * d * a.n * b.n / out.n;
  return out;
}

inline Moments merge_pairwise(const std::vector<Moments>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(merge_pairwise(parts, lo, mid), merge_pairwise(parts, mid, hi));
}

inline double sample_prior(const InputDistribution& dist, NormalStream& rng) {
  if (dist.is_gaussian()) return dist.mean() + std::sqrt(dist.variance()) * rng.normal();
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& a : dist.atoms()) {
    acc += a.prob;
    if (u <= acc) return a.value;
  }
  return dist.atoms().back().value;
}

/// Runs `draw(rng)` cfg.mc_samples times over the fixed stream layout.
template <typename Draw>
McEstimate run_streams(const OracleConfig& cfg, Draw draw) {
  if (cfg.mc_samples < kMinMcSamples) {
    throw Error(ErrorCode::InvalidArgument, "mc_samples must be >= 100000");
  }
  std::vector<std::future<Moments>> jobs;
  jobs.reserve(kStreams);
  const std::int64_t base = cfg.mc_samples / kStreams;
  const std::int64_t extra = cfg.mc_samples % kStreams;
  for (int s = 0; s < kStreams; ++s) {
    const std::int64_t count = base + (s < extra ? 1 : 0);
    const std::uint64_t seed = splitmix64(cfg.rng_seed ^ splitmix64(static_cast<std::uint64_t>(s) + 1));
    jobs.push_back(std::async(std::launch::async, [count, seed, &draw] {
      NormalStream rng(seed);
      Moments m;
      for (std::int64_t i = 0; i < count; ++i) m.add(draw(rng));
      return m;
    }));
  }
  std::vector<Moments> parts;
  parts.reserve(kStreams);
  for (auto& j : jobs) parts.push_back(j.get());
  const Moments all = merge_pairwise(parts, 0, parts.size());
  McEstimate e;
  e.estimate = all.mean;
  e.std_error = std::sqrt(all.m2 / (all.n - 1.0) / all.n);
  e.samples = cfg.mc_samples;
  e.seed = cfg.rng_seed;
  return e;
}

inline double log_normal_density(double v, double mean, double var) noexcept {
  const double d = v - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

}  // namespace detail

/// Monte-Carlo estimate of I = E{log p(Y|X) - log p(Y)}.
inline McEstimate mc_mutual_information(const InputDistribution& dist, double beta,
                                        const OracleConfig& cfg) {
  detail::require_positive_beta(beta);
  const double noise_sd = 1.0 / std::sqrt(beta);
  const double noise_var = 1.0 / beta;
  return detail::run_streams(cfg, [&](detail::NormalStream& rng) {
    const double x = detail::sample_prior(dist, rng);
    const double y = x + noise_sd * rng.normal();
    const double log_lik = detail::log_normal_density(y, x, noise_var);
    double log_out = 0.0;
    if (dist.is_gaussian()) {
      log_out = detail::log_normal_density(y, dist.mean(), dist.variance() + noise_var);
    } else {
      double top = -std::numeric_limits<double>::infinity();
      for (const auto& a : dist.atoms()) {
        top = std::max(top, std::log(a.prob) + detail::log_normal_density(y, a.value, noise_var));
      }
      double s = 0.0;
      for (const auto& a : dist.atoms()) {
        s += std::exp(std::log(a.prob) + detail::log_normal_density(y, a.value, noise_var) - top);
      }
      log_out = top + std::log(s);
    }
    return log_lik - log_out;
  });
}

/// Monte-Carlo estimate of E{(X - E[X|Y])^2}. The conditional mean comes
/// from the library posterior.
inline McEstimate mc_mmse(const InputDistribution& dist, double beta, const OracleConfig& cfg) {
  detail::require_nonnegative_beta(beta);
  const double noise_sd = beta > 0.0 ? 1.0 / std::sqrt(beta) : 0.0;
  return detail::run_streams(cfg, [&](detail::NormalStream& rng) {
    const double x = detail::sample_prior(dist, rng);
    const double noise = rng.normal();
    const double estimate = beta > 0.0 ? posterior(dist, x + noise_sd * noise, beta).mean
                                       : prior_mean(dist);
    return (x - estimate) * (x - estimate);
  });
}

}  // namespace thermi
