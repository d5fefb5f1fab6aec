#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "thermi/boltzmann.hpp"

using namespace thermi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::vector<InputDistribution> discrete_priors() {
  return {bernoulli_half(), make_discrete({{-1.0, 0.25}, {1.0, 0.75}}),
          make_discrete({{0.0, 0.5}, {2.0, 0.25}, {-1.0, 0.25}}),
          make_discrete({{-3.0, 0.25}, {-1.0, 0.25}, {1.0, 0.25}, {3.0, 0.25}}),
          make_discrete({{-2.0, 0.1}, {-0.5, 0.2}, {0.0, 0.3}, {1.5, 0.15}, {4.0, 0.25}})};
}

// A Gaussian prior discretized on 401 atoms over +-8 sigma.
InputDistribution discretized_gaussian(double mean, double variance) {
  const double sigma = std::sqrt(variance);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int k = -200; k <= 200; ++k) {
    const double z = 8.0 * k / 200.0;
    atoms.push_back({mean + sigma * z, std::exp(-0.5 * z * z)});
    total += atoms.back().prob;
  }
  for (auto& a : atoms) a.prob /= total;
  return make_discrete(atoms);
}

}  // namespace

TEST(ChannelPoint, Temperature) {
  EXPECT_DOUBLE_EQ(ChannelPoint(4.0).temperature(), 0.25);
  EXPECT_TRUE(std::isinf(ChannelPoint(0.0).temperature()));
  EXPECT_EQ(code_of([] { ChannelPoint(-1.0); }), ErrorCode::InvalidArgument);
}

TEST(Energy, Examples) {
  EXPECT_DOUBLE_EQ(energy(bernoulli_half(), 1.0, 2.0, 1.0), -2.0);
  EXPECT_DOUBLE_EQ(energy(bernoulli_half(), -1.0, 2.0, 3.7), 2.0);
  EXPECT_DOUBLE_EQ(energy(make_gaussian(0.0, 1.0), 1.0, 0.0, 1.0), 1.0);
  const auto g = make_gaussian(0.0, 1.0);
  for (double beta : {0.3, 1.0, 4.0}) {
    EXPECT_NEAR(energy(g, 1.3, 0.4, beta), -1.3 * 0.4 + 0.5 * 1.69 * (1.0 + beta) / beta, 1e-14);
  }
  const auto d = make_discrete({{0.0, 0.5}, {2.0, 0.25}, {-1.0, 0.25}});
  for (double y : {-3.0, 0.0, 1.7}) {
    EXPECT_NEAR(energy(d, 0.0, y, 2.0), -std::log(0.5) / 2.0, 1e-15);
  }
}

TEST(Energy, Errors) {
  const auto d = make_discrete({{-1.0, 0.25}, {1.0, 0.75}});
  EXPECT_EQ(code_of([&] { energy(d, 1.0, 0.0, 0.0); }), ErrorCode::BetaZero);
  EXPECT_EQ(code_of([&] { energy(make_gaussian(0.0, 1.0), 1.0, 0.0, 0.0); }), ErrorCode::BetaZero);
  EXPECT_EQ(code_of([&] { energy(d, 0.5, 0.0, 1.0); }), ErrorCode::AtomNotFound);
  EXPECT_DOUBLE_EQ(energy(bernoulli_half(), 1.0, 0.5, 0.0), -0.5);
}

TEST(EnergyDbeta, Examples) {
  EXPECT_DOUBLE_EQ(energy_dbeta(make_gaussian(0.0, 1.0), 2.0, 0.3, 1.0), -2.0);
  for (double y : {-1.0, 0.0, 2.5}) {
    for (double beta : {0.1, 1.0, 7.0}) {
      EXPECT_EQ(energy_dbeta(bernoulli_half(), 1.0, y, beta), 0.0);
      EXPECT_EQ(energy_dbeta(bernoulli_half(), -1.0, y, beta), 0.0);
    }
  }
  // Non-uniform atoms: d/dbeta [-log P(x) / beta] = log P(x) / beta^2.
  const auto d = make_discrete({{-1.0, 0.25}, {1.0, 0.75}});
  EXPECT_NEAR(energy_dbeta(d, -1.0, 0.0, 2.0), std::log(0.25) / 4.0, 1e-15);
}

TEST(EnergyDbeta, MatchesFiniteDifference) {
  auto priors = discrete_priors();
  priors.push_back(make_gaussian(0.0, 1.0));
  priors.push_back(make_gaussian(1.5, 0.3));
  for (const auto& d : priors) {
    const std::vector<double> xs =
        d.is_gaussian() ? std::vector<double>{-1.0, 0.2, 2.0} : std::vector<double>{d.atoms()[0].value,
                                                                                     d.atoms()[1].value};
    for (double x : xs) {
      for (double beta : {0.5, 1.0, 3.0}) {
        const double fd = central_difference([&](double b) { return energy(d, x, 0.8, b); }, beta, 1e-5);
        EXPECT_NEAR(energy_dbeta(d, x, 0.8, beta), fd, 1e-6);
      }
    }
  }
}

TEST(Posterior, Examples) {
  const auto g = posterior(make_gaussian(0.0, 1.0), 2.0, 1.0);
  EXPECT_NEAR(g.mean, 1.0, 1e-15);
  EXPECT_NEAR(g.variance, 0.5, 1e-15);
  EXPECT_TRUE(g.weights.empty());

  for (double beta : {0.1, 1.0, 50.0}) {
    const auto p = posterior(bernoulli_half(), 0.0, beta);
    EXPECT_DOUBLE_EQ(p.weights[0].prob, 0.5);
    EXPECT_DOUBLE_EQ(p.weights[1].prob, 0.5);
  }
  const auto p = posterior(bernoulli_half(), 1.0, 1.0);
  EXPECT_NEAR(p.weights[1].prob, std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(p.weights[1].prob, 0.8808, 1e-4);
}

TEST(Posterior, GaussianClosedFormShape) {
  for (double beta : {0.2, 1.0, 6.0}) {
    for (double y : {-2.0, 0.3, 4.0}) {
      const auto p = posterior(make_gaussian(0.0, 1.0), y, beta);
      EXPECT_NEAR(p.mean, beta * y / (1.0 + beta), 1e-14);
      EXPECT_NEAR(p.variance, 1.0 / (1.0 + beta), 1e-14);
    }
  }
}

TEST(Posterior, BetaZeroIsPrior) {
  const auto d = make_discrete({{-1.0, 0.25}, {1.0, 0.75}});
  const auto p = posterior(d, 3.0, 0.0);
  EXPECT_EQ(p.weights, d.atoms());
  EXPECT_EQ(p.log_partition, 0.0);
  const auto g = posterior(make_gaussian(2.0, 3.0), 3.0, 0.0);
  EXPECT_EQ(g.mean, 2.0);
  EXPECT_EQ(g.variance, 3.0);
}

TEST(Posterior, NormalizedOnRandomGrid) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uy(-20.0, 20.0);
  std::uniform_real_distribution<double> ub(-6.0, 3.0);
  for (const auto& d : discrete_priors()) {
    for (int i = 0; i < 200; ++i) {
      const auto p = posterior(d, uy(rng), std::pow(10.0, ub(rng)));
      double total = 0.0;
      for (const auto& w : p.weights) {
        EXPECT_GE(w.prob, 0.0);
        EXPECT_LE(w.prob, 1.0);
        total += w.prob;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Posterior, NoOverflowAtLargeBetaY) {
  const auto p = posterior(bernoulli_half(), 400.0, 1e4);
  EXPECT_EQ(p.weights[1].prob, 1.0);
  EXPECT_TRUE(std::isfinite(p.log_partition));
}

TEST(Posterior, DiscretizedGaussianAgrees) {
  const auto exact = make_gaussian(0.0, 1.0);
  const auto grid = discretized_gaussian(0.0, 1.0);
  for (double beta : {0.5, 1.0, 4.0}) {
    for (double y : {-1.5, 0.0, 0.8, 2.5}) {
      const auto a = posterior(exact, y, beta);
      const auto b = posterior(grid, y, beta);
      EXPECT_NEAR(a.mean, b.mean, 1e-4);
      EXPECT_NEAR(a.variance, b.variance, 1e-4);
    }
  }
}

TEST(Posterior, SmallBetaApproachesPrior) {
  for (const auto& d : discrete_priors()) {
    for (double y : {-5.0, 0.0, 3.0}) {
      const auto p = posterior(d, y, 1e-8);
      double tv = 0.0;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        tv += 0.5 * std::abs(p.weights[i].prob - d.atoms()[i].prob);
      }
      EXPECT_LT(tv, 1e-6);
    }
  }
}

TEST(InternalEnergy, Examples) {
  EXPECT_NEAR(internal_energy(bernoulli_half(), 1.0, 1.0), -std::tanh(1.0), 1e-15);
  EXPECT_NEAR(internal_energy(bernoulli_half(), 1.0, 1.0), -0.7616, 1e-4);
  EXPECT_EQ(internal_energy(bernoulli_half(), 0.0, 2.0), 0.0);
  EXPECT_NEAR(internal_energy(make_gaussian(0.0, 1.0), 1.0, 1.0), 0.25, 1e-15);
  for (double y : {-2.0, 0.5, 3.0}) {
    for (double beta : {0.3, 2.0}) {
      EXPECT_NEAR(internal_energy(make_gaussian(0.0, 1.0), y, beta),
                  -y * y * beta / (2.0 * (1.0 + beta)) + 1.0 / (2.0 * beta), 1e-13);
    }
  }
}

TEST(PosteriorEntropy, Examples) {
  for (double beta : {0.0, 0.5, 30.0}) {
    EXPECT_NEAR(posterior_entropy(bernoulli_half(), 0.0, beta), std::numbers::ln2, 1e-15);
  }
  EXPECT_LT(posterior_entropy(bernoulli_half(), 40.0, 1.0), 1e-30);
  for (double y : {-3.0, 0.0, 2.0}) {
    EXPECT_NEAR(posterior_entropy(make_gaussian(0.0, 1.0), y, 1.0),
                0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * 0.5), 1e-15);
  }
  EXPECT_NEAR(posterior_entropy(make_gaussian(0.0, 1.0), 0.0, 1.0), 1.0724, 1e-4);
  EXPECT_NEAR(posterior_entropy(bernoulli_half(), 1.0, 1.0), 0.36533385508720760832, 1e-14);
}

TEST(LogPartition, Examples) {
  EXPECT_NEAR(log_partition(bernoulli_half(), 1.0, 1.0), 1.1269280110429724964, 1e-14);
  for (double y : {-2.0, 0.3}) {
    for (double beta : {0.5, 3.0}) {
      EXPECT_NEAR(log_partition(bernoulli_half(), y, beta), std::log(2.0 * std::cosh(beta * y)), 1e-13);
    }
  }
  const ThermalState st = thermal_state(bernoulli_half(), 0.7, 2.3);
  EXPECT_LT(std::abs(st.log_partition + 2.3 * st.internal_energy - st.entropy), 1e-10);
  const auto uniform3 = make_discrete({{-1.0, 1.0 / 3}, {0.0, 1.0 / 3}, {2.0, 1.0 / 3}});
  EXPECT_NEAR(log_partition(uniform3, 0.9, 1e-12), std::log(3.0), 1e-11);
  EXPECT_NEAR(log_partition(bernoulli_half(), 0.9, 1e-12), std::numbers::ln2, 1e-11);
}

TEST(Identity, RandomGridDiscrete) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uy(-6.0, 6.0);
  std::uniform_real_distribution<double> ub(-2.0, 1.5);
  for (const auto& d : discrete_priors()) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double beta = std::pow(10.0, ub(rng));
      const ThermalState st = thermal_state(d, uy(rng), beta);
      worst = std::max(worst, std::abs(st.log_partition + beta * st.internal_energy - st.entropy));
    }
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(Identity, GaussianPrior) {
  for (double y : {-3.0, 0.0, 1.1}) {
    for (double beta : {0.05, 1.0, 20.0}) {
      const ThermalState st = thermal_state(make_gaussian(0.4, 2.0), y, beta);
      EXPECT_NEAR(st.log_partition + beta * st.internal_energy, st.entropy, 1e-11);
    }
  }
}

TEST(Gauge, ShiftLeavesObservablesAlone) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uy(-4.0, 4.0);
  std::uniform_real_distribution<double> uc(-10.0, 10.0);
  auto priors = discrete_priors();
  priors.push_back(make_gaussian(0.0, 1.0));
  for (const auto& d : priors) {
    for (int i = 0; i < 30; ++i) {
      const double y = uy(rng);
      const double beta = 0.1 + 4.0 * (i / 30.0);
      const EnergyShift c{uc(rng)};
      const auto a = posterior(d, y, beta);
      const auto b = posterior(d, y, beta, c);
      for (std::size_t k = 0; k < a.weights.size(); ++k) {
        EXPECT_NEAR(a.weights[k].prob, b.weights[k].prob, 1e-12);
      }
      EXPECT_NEAR(a.mean, b.mean, 1e-12);
      EXPECT_NEAR(a.variance, b.variance, 1e-12);
      const ThermalState s0 = thermal_state(d, y, beta);
      const ThermalState s1 = thermal_state(d, y, beta, c);
      EXPECT_NEAR(s0.entropy, s1.entropy, 1e-12);
      const double scale = std::max(1.0, std::abs(beta * c.value));
      EXPECT_NEAR(s1.log_partition - s0.log_partition, -beta * c.value, 1e-12 * scale);
      EXPECT_NEAR(s1.internal_energy - s0.internal_energy, c.value, 1e-12 * std::max(1.0, std::abs(c.value)));
    }
  }
}

TEST(HeatCapacity, Examples) {
  const QuadratureConfig q;
  EXPECT_NEAR(heat_capacity(bernoulli_half(), 1.0, 1.0, q), -0.41997434161402606939, 1e-5);
  EXPECT_EQ(heat_capacity(bernoulli_half(), 0.0, 1.0, q), 0.0);
  EXPECT_NEAR(heat_capacity(make_gaussian(0.0, 1.0), 0.0, 1.0, q), -0.5, 1e-4);
  EXPECT_EQ(code_of([&] { heat_capacity(bernoulli_half(), 1.0, 1e-3, q); }), ErrorCode::InvalidArgument);
}

TEST(GroundStateEntropy, Degeneracy) {
  EXPECT_NEAR(ground_state_entropy(bernoulli_half(), 0.0), std::numbers::ln2, 1e-15);
  EXPECT_EQ(ground_state_entropy(bernoulli_half(), 1.0), 0.0);
  EXPECT_EQ(code_of([] { ground_state_entropy(make_gaussian(0.0, 1.0), 0.0); }), ErrorCode::InvalidArgument);
}
