#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "teleop/lti.hpp"

namespace teleop {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(EvalTf, ConstantIsIdentity) {
  const RationalTF one({1.0}, {1.0});
  const Complex v = eval_tf(one, {3.0, 4.0});
  EXPECT_DOUBLE_EQ(v.real(), 1.0);
  EXPECT_DOUBLE_EQ(v.imag(), 0.0);
}

TEST(EvalTf, RobotModelDcGain) {
  // 2 / (s + 2) at s = 0
  const RationalTF m({2.0}, {2.0, 1.0});
  const Complex v = eval_tf(m, 0.0);
  EXPECT_DOUBLE_EQ(v.real(), 1.0);
  EXPECT_DOUBLE_EQ(v.imag(), 0.0);
}

TEST(EvalTf, IntegratorWithLagByHand) {
  // 1 / (s (0.5 s + 1)) at s = j: 1 / (-0.5 + j) = -0.4 - 0.8j
  const RationalTF tf({1.0}, {0.0, 1.0, 0.5});
  const Complex v = eval_tf(tf, {0.0, 1.0});
  EXPECT_NEAR(v.real(), -0.4, 1e-15);
  EXPECT_NEAR(v.imag(), -0.8, 1e-15);

  const Complex ref = oracle::brute_poly({1.0}, {0.0, 1.0}) /
                      oracle::brute_poly({0.0, 1.0, 0.5}, {0.0, 1.0});
  EXPECT_NEAR(std::abs(v - ref), 0.0, 1e-15);
}

TEST(EvalTf, PoleHit) {
  const RationalTF tf({1.0}, {2.0, 1.0});
  EXPECT_THROW(eval_tf(tf, -2.0), PoleHit);
  EXPECT_NO_THROW(eval_tf(tf, -2.0 + 1e-6));
}

TEST(EvalTf, ZeroDenominatorRejected) {
  EXPECT_THROW(RationalTF({1.0}, {0.0, 0.0}), ValidationError);
}

TEST(EvalTf, AgreesWithBruteForcePowers) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_int_distribution<int> deg(0, 6);
  std::uniform_real_distribution<double> arg(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> num(deg(rng) + 1), den(deg(rng) + 1);
    for (double& c : num) c = coef(rng);
    for (double& c : den) c = coef(rng);
    den.back() = den.back() == 0.0 ? 1.0 : den.back();
    const Complex s{arg(rng), arg(rng)};
    const Complex d = oracle::brute_poly(den, s);
    if (std::abs(d) < 1e-3) continue;
    const Complex ref = oracle::brute_poly(num, s) / d;
    const Complex got = eval_tf(RationalTF(Polynomial(num), Polynomial(den)), s);
    EXPECT_LE(std::abs(got - ref), 1e-12 * std::max(1.0, std::abs(ref))) << "trial " << trial;
  }
}

TEST(Polynomial, TrimsAndMultiplies) {
  const Polynomial p{1.0, 2.0, 0.0, 0.0};
  EXPECT_EQ(p.degree(), 1);
  const Polynomial q = p * Polynomial{-1.0, 1.0};  // (1 + 2x)(x - 1) = -1 - x + 2x^2
  EXPECT_EQ(q, (Polynomial{-1.0, -1.0, 2.0}));
  EXPECT_EQ((p - p).degree(), -1);
}

TEST(ZohFactor, DcLimit) {
  for (double T : {1e-6, 1e-3, 0.006, 1.0, 10.0}) {
    const Complex v = zoh_factor(Complex{0.0, 1e-10 / T}, T);
    EXPECT_NEAR(v.real(), 1.0, 1e-12);
    EXPECT_NEAR(v.imag(), 0.0, 1e-9);
  }
  EXPECT_EQ(zoh_factor(0.0, 0.5), Complex(1.0, 0.0));
}

TEST(ZohFactor, HalfRotation) {
  // sT = j pi -> 2 / (j pi) = -(2/pi) j
  const double T = 0.01;
  const Complex v = zoh_factor(Complex{0.0, kPi / T}, T);
  EXPECT_NEAR(v.real(), 0.0, 1e-15);
  EXPECT_NEAR(v.imag(), -2.0 / kPi, 1e-15);
}

TEST(ZohFactor, MatchesIndependentExponential) {
  const double T = 0.006;
  const Complex s{0.0, 100.0};
  const Complex x = s * T;
  // e^{-x} from cos/sin, independent of std::exp(complex)
  const Complex e{std::cos(-x.imag()), std::sin(-x.imag())};
  const Complex ref = (1.0 - e) / x;
  EXPECT_LE(std::abs(zoh_factor(s, T) - ref), 1e-12);
}

TEST(ZohFactor, MagnitudeAtMostOne) {
  for (double T : {1e-4, 0.006, 0.5}) {
    const auto grid = make_grid(T, 512, GridSpacing::Log);
    for (double w : grid.points()) EXPECT_LE(std::abs(zoh_factor(Complex{0.0, w}, T)), 1.0 + 1e-15);
  }
}

TEST(BackwardDiff, Examples) {
  EXPECT_EQ(backward_diff_gain(1.0, 0.3), Complex(0.0, 0.0));
  const Complex v = backward_diff_gain(-1.0, 0.5);
  EXPECT_DOUBLE_EQ(v.real(), 4.0);
  EXPECT_DOUBLE_EQ(v.imag(), 0.0);

  const double T = 0.01;
  const Complex q = backward_diff_gain(std::polar(1.0, kPi / 2.0), T);
  EXPECT_NEAR(q.real(), 100.0, 1e-12);
  EXPECT_NEAR(q.imag(), 100.0, 1e-12);

  EXPECT_THROW(backward_diff_gain(0.0, T), DegenerateZ);
}

TEST(BackwardDiff, ApproachesDifferentiator) {
  const double T = 0.01;
  const double w = 1e-4 / T;
  const Complex got = backward_diff_gain(std::polar(1.0, w * T), T);
  const Complex jw{0.0, w};
  EXPECT_LT(std::abs(got - jw) / std::abs(jw), 1e-3);
}

TEST(Tustin, ApproachesDifferentiator) {
  const double T = 0.01;
  const double w = 1e-3 / T;
  const Complex got = tustin_gain(std::polar(1.0, w * T), T);
  EXPECT_LT(std::abs(got - Complex{0.0, w}) / w, 1e-6);
  EXPECT_THROW(tustin_gain(-1.0, T), DegenerateZ);
}

TEST(MakeGrid, TwoPointLinear) {
  const auto g = make_grid(1.0, 2, GridSpacing::Linear);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_DOUBLE_EQ(g[0], kPi / 2.0);
  EXPECT_DOUBLE_EQ(g[1], kPi);
}

TEST(MakeGrid, NyquistAndShape) {
  const auto g = make_grid(0.006);
  EXPECT_NEAR(g.nyquist(), 523.5987755982989, 1e-9);
  ASSERT_EQ(g.size(), 512u);
  EXPECT_EQ(g[511], kPi / 0.006);
  EXPECT_NEAR(g[0], kPi / (0.006 * 1e6), 1e-15);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(MakeGrid, RejectsTooFewPoints) {
  EXPECT_THROW(make_grid(0.01, 1), BadGrid);
  EXPECT_THROW(make_grid(0.01, 0), BadGrid);
}

}  // namespace
}  // namespace teleop
