#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "thermi/quadrature.hpp"

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

// E[Z^k] for Z ~ N(0, 1).
double normal_moment(int k) {
  if (k % 2) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 1; j -= 2) m *= j;
  return m;
}

// E[|Z|^k], the scale of the terms being summed.
double abs_normal_moment(int k) {
  return std::pow(2.0, 0.5 * k) * std::tgamma(0.5 * (k + 1)) / std::sqrt(std::numbers::pi);
}

}  // namespace

TEST(Config, Validation) {
  QuadratureConfig q;
  EXPECT_NO_THROW(validate(q));
  q.hermite_nodes = 8;
  EXPECT_EQ(code_of([&] { validate(q); }), ErrorCode::InvalidArgument);
  q = {};
  q.beta_grid_points = 10;
  EXPECT_EQ(code_of([&] { validate(q); }), ErrorCode::InvalidArgument);
  q = {};
  q.fd_step = 0.1;
  EXPECT_EQ(code_of([&] { validate(q); }), ErrorCode::InvalidArgument);
  q = {};
  q.beta_floor = 0.0;
  EXPECT_EQ(code_of([&] { validate(q); }), ErrorCode::InvalidArgument);
}

TEST(GaussHermite, RuleIsSymmetricAndNormalized) {
  for (int n : {16, 64, 128, 256, 512}) {
    const auto rule = gauss_hermite_rule(n);
    double w = 0.0;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
      w += rule->weights[i];
      EXPECT_DOUBLE_EQ(rule->nodes[i], -rule->nodes[rule->nodes.size() - 1 - i]);
    }
    EXPECT_NEAR(w, std::sqrt(std::numbers::pi), 1e-13) << n;
  }
}

TEST(IntegrateGaussianWeight, Examples) {
  const QuadratureConfig q;
  EXPECT_NEAR(integrate_gaussian_weight([](double) { return 1.0; }, 3.0, 7.0, q), 1.0, 1e-14);
  for (double v : {0.1, 1.0, 4.0}) {
    EXPECT_NEAR(integrate_gaussian_weight([](double y) { return y * y; }, 0.0, v, q), v, 1e-13 * v);
  }
}

TEST(IntegrateGaussianWeight, YTanhYExact) {
  // E[Y tanh Y] for Y ~ N(1, 1) reduces to e^{-1/2} E[Z sinh Z] = 1.
  EXPECT_NEAR(integrate_gaussian_weight([](double y) { return y * std::tanh(y); }, 1.0, 1.0, {}), 1.0,
              1e-10);
}

TEST(IntegrateGaussianWeight, YTanhYAgainstMonteCarlo) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01;
  const int samples = 10'000'000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double y = 1.0 + n01(rng);
    sum += y * std::tanh(y);
  }
  const double quad = integrate_gaussian_weight([](double y) { return y * std::tanh(y); }, 1.0, 1.0, {});
  EXPECT_NEAR(quad, sum / samples, 1e-3);
}

TEST(IntegrateGaussianWeight, ExactForPolynomials) {
  QuadratureConfig q;
  q.hermite_nodes = 16;
  const auto rule = gauss_hermite_rule(q.hermite_nodes);
  for (int k = 0; k < 2 * q.hermite_nodes; ++k) {
    auto power = [k](double z) { return std::pow(z, k); };
    const double got = detail::gauss_hermite_sum(power, *rule, 0.0, std::sqrt(2.0));
    EXPECT_NEAR(got, normal_moment(k), 1e-12 * std::max(1.0, abs_normal_moment(k))) << k;
  }
  // Shifted and scaled: E[(m + s Z)^3] = m^3 + 3 m s^2.
  const double m = 0.7;
  const double v = 2.5;
  EXPECT_NEAR(integrate_gaussian_weight([](double y) { return y * y * y; }, m, v, q), m * m * m + 3 * m * v,
              1e-12);
}

TEST(IntegrateGaussianWeight, HermiteMatchesSimpson) {
  const QuadratureConfig q;
  auto log_cosh = [](double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
  };
  for (double beta : {0.5, 2.0, 10.0, 25.0}) {
    auto f = [&](double z) { return log_cosh(beta - std::sqrt(beta) * z); };
    const double gh = integrate_gaussian_weight(f, 0.0, 1.0, q);
    const double simpson = integrate_gaussian_weight_simpson(f, 0.0, 1.0, q);
    EXPECT_NEAR(gh, simpson, 1e-8) << beta;
  }
  auto smooth = [](double y) { return std::cos(y) * y * y; };
  EXPECT_NEAR(integrate_gaussian_weight(smooth, 0.3, 1.7, q),
              integrate_gaussian_weight_simpson(smooth, 0.3, 1.7, q), 1e-8);
}

TEST(IntegrateGaussianWeight, ConstantOffsetPassesThrough) {
  const QuadratureConfig q;
  auto log_cosh = [](double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
  };
  for (double beta : {1.0, 10.0, 25.0}) {
    auto f = [&](double z) { return log_cosh(beta - std::sqrt(beta) * z); };
    const double base = integrate_gaussian_weight(f, 0.0, 1.0, q);
    for (double c : {7.3, 73.0, -250.0}) {
      const double shifted = integrate_gaussian_weight([&](double z) { return f(z) + c; }, 0.0, 1.0, q);
      EXPECT_NEAR(shifted - c, base, 1e-11) << beta << " " << c;
    }
  }
}

TEST(IntegrateGaussianWeight, NonFiniteIntegrand) {
  EXPECT_EQ(code_of([] { integrate_gaussian_weight([](double y) { return 1.0 / (y - y); }, 0.0, 1.0, {}); }),
            ErrorCode::NonFiniteIntegrand);
}

TEST(IntegrateBeta, Examples) {
  const QuadratureConfig q;
  EXPECT_NEAR(integrate_beta([](double) { return 1.0; }, 0.0, 2.0, q, 1.0), 2.0, 1e-9);
  EXPECT_NEAR(integrate_beta([](double g) { return g; }, 0.0, 1.0, q, 0.0), 0.5, 1e-9);
  EXPECT_NEAR(integrate_beta([](double g) { return std::exp(g); }, 0.5, 1.5, q),
              std::exp(1.5) - std::exp(0.5), 1e-10);
}

TEST(IntegrateBeta, TailOnlyWithSuppliedLimit) {
  QuadratureConfig q;
  q.beta_floor = 1e-3;
  const double without = integrate_beta([](double) { return 1.0; }, 0.0, 1.0, q);
  const double with = integrate_beta([](double) { return 1.0; }, 0.0, 1.0, q, 1.0);
  EXPECT_NEAR(without, 1.0 - 1e-3, 1e-12);
  EXPECT_NEAR(with, 1.0, 1e-12);
}

TEST(IntegrateBeta, DivergentAtZeroWithoutLimit) {
  QuadratureConfig q;
  for (double floor : {1e-6, 1e-3}) {
    q.beta_floor = floor;
    EXPECT_NEAR(integrate_beta([](double g) { return 1.0 / g; }, 0.0, 2.0, q), std::log(2.0 / floor), 1e-10);
    EXPECT_NEAR(integrate_beta([](double g) { return -0.7 / g + std::cos(g); }, 0.0, 1.5, q),
                -0.7 * std::log(1.5 / floor) + std::sin(1.5) - std::sin(floor), 1e-10);
  }
}

TEST(IntegrateBeta, Linearity) {
  const QuadratureConfig q;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng);
    const double b = u(rng);
    const double c1 = u(rng);
    const double c2 = u(rng);
    auto g1 = [&](double g) { return std::sin(c1 * g) + g * g; };
    auto g2 = [&](double g) { return std::exp(-c2 * c2 * g) / (1.0 + g); };
    const double lhs = integrate_beta([&](double g) { return a * g1(g) + b * g2(g); }, 0.0, 3.0, q, b);
    const double rhs = a * integrate_beta(g1, 0.0, 3.0, q, 0.0) + b * integrate_beta(g2, 0.0, 3.0, q, 1.0);
    EXPECT_NEAR(lhs, rhs, 1e-10);
  }
}

TEST(IntegrateBeta, Errors) {
  const QuadratureConfig q;
  EXPECT_EQ(code_of([&] { integrate_beta([](double) { return 1.0; }, 1.0, 0.5, q); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { integrate_beta([](double) { return NAN; }, 0.5, 1.0, q); }),
            ErrorCode::NonFiniteIntegrand);
}

TEST(IntegrateBetaToInfinity, DecayingTail) {
  const QuadratureConfig q;
  EXPECT_NEAR(integrate_beta_to_infinity([](double g) { return std::exp(-g); }, 1.0, q), std::exp(-1.0),
              1e-9);
  EXPECT_NEAR(integrate_beta_to_infinity([](double g) { return g * std::exp(-2.0 * g); }, 0.5, q),
              std::exp(-1.0) * (0.25 + 0.25), 1e-9);
}

TEST(CentralDifference, Examples) {
  EXPECT_NEAR(central_difference([](double b) { return b * b; }, 2.0, 1e-3), 4.0, 1e-6);
  EXPECT_NEAR(central_difference([](double b) { return 0.5 * std::log1p(b); }, 1.0, 1e-3), 0.25, 1e-6);
  EXPECT_EQ(central_difference([](double) { return 3.25; }, 1.0, 1e-3), 0.0);
}

TEST(CentralDifference, Errors) {
  EXPECT_EQ(code_of([] { central_difference([](double b) { return b; }, 1e-3, 1e-3); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { central_difference([](double b) { return std::log(b - 1.0); }, 1.0005, 1e-3); }),
            ErrorCode::NonFiniteValue);
}

TEST(CentralDifference, ErrorShrinksQuadratically) {
  struct Case {
    double (*h)(double);
    double (*dh)(double);
  };
  const Case cases[] = {
      {[](double b) { return std::sin(b); }, [](double b) { return std::cos(b); }},
      {[](double b) { return std::exp(0.5 * b); }, [](double b) { return 0.5 * std::exp(0.5 * b); }},
      {[](double b) { return std::log1p(b); }, [](double b) { return 1.0 / (1.0 + b); }},
  };
  for (const auto& c : cases) {
    const double at = 1.3;
    const double e1 = std::abs(central_difference(c.h, at, 1e-2) - c.dh(at));
    const double e2 = std::abs(central_difference(c.h, at, 5e-3) - c.dh(at));
    EXPECT_NEAR(e1 / e2, 4.0, 0.05);
  }
}
