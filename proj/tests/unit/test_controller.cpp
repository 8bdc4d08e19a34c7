#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "teleop/controller.hpp"

namespace teleop {
namespace {

const ControllerGains kBench{1.0, 10.0, 2.0, 0.002, 4.0};

TEST(ControlContinuous, Examples) {
  EXPECT_EQ(control_continuous(kBench, {0.3, 0.0}, {0.3, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(control_continuous({1.0, 0.0, 0.0, 0.0, {}}, {2.0, 0.0}, {1.0, 0.0}), -1.0);
  EXPECT_NEAR(control_continuous(kBench, {1.0, 0.5}, {0.0, 0.0}), -7.001, 1e-12);
}

TEST(ControlContinuous, OddInCoordinationError) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    // Zero own velocity isolates the coordination terms.
    const double dq = u(rng), dv = u(rng), base = u(rng);
    const double a = control_continuous(kBench, {base + dq, 0.0}, {base, -dv});
    const double b = control_continuous(kBench, {base - dq, 0.0}, {base, dv});
    EXPECT_NEAR(a, -b, 1e-12);
  }
}

TEST(ControlSampled, MatchesContinuousOnLatchedValues) {
  LatchedState latch;
  latch.own = JointState{1.0, 0.5};
  latch.remote = JointState{0.0, 0.0};
  EXPECT_NEAR(control_sampled(kBench, latch), -7.001, 1e-12);
  latch.remote = latch.own;
  latch.own->v = 0.0;
  latch.remote->v = 0.0;
  EXPECT_EQ(control_sampled(kBench, latch), 0.0);
}

TEST(ControlSampled, RequiresBothSides) {
  LatchedState latch;
  EXPECT_THROW(control_sampled(kBench, latch), NotYetInitialized);
  latch.own = JointState{};
  EXPECT_THROW(control_sampled(kBench, latch), NotYetInitialized);
}

// Held samples of a smooth trajectory deviate from the live signal by O(T).
double max_hold_deviation(double T) {
  auto own = [](double t) { return JointState{std::sin(2.0 * t), 2.0 * std::cos(2.0 * t)}; };
  auto rem = [](double t) { return JointState{0.5 * std::cos(3.0 * t), -1.5 * std::sin(3.0 * t)}; };
  double worst = 0.0;
  const int fine = 20;
  const long periods = std::lround(1.0 / T);
  for (long k = 0; k < periods; ++k) {
    LatchedState latch;
    latch.own = own(k * T);
    latch.remote = rem(k * T);
    const double held = control_sampled(kBench, latch);
    for (int i = 0; i < fine; ++i) {
      const double t = (k + static_cast<double>(i) / fine) * T;
      worst = std::max(worst, std::abs(held - control_continuous(kBench, own(t), rem(t))));
    }
  }
  return worst;
}

TEST(ControlSampled, ConvergesLinearlyInPeriod) {
  const double e2 = max_hold_deviation(1e-2);
  const double e3 = max_hold_deviation(1e-3);
  const double e4 = max_hold_deviation(1e-4);
  const double slope1 = std::log10(e2 / e3);
  const double slope2 = std::log10(e3 / e4);
  EXPECT_NEAR(slope1, 1.0, 0.1);
  EXPECT_NEAR(slope2, 1.0, 0.1);
}

TEST(ControllerZ, DcIsProportional) {
  const auto c = controller_z_tf(kBench, 0.006);
  const Complex v = c(Complex{1.0, 0.0});
  EXPECT_NEAR(v.real(), 1.0, 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(ControllerZ, NyquistExample) {
  const auto c = controller_z_tf(kBench, 0.006);
  const Complex v = c(Complex{-1.0, 0.0});
  EXPECT_NEAR(v.real(), 12.002 * 2.0 / 0.006 + 1.0, 1e-9);
  EXPECT_NEAR(v.real(), 4001.67, 5e-3);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(ControllerZ, ProportionalOnly) {
  const auto c = controller_z_tf({5.0, 0.0, 0.0, 0.0, {}}, 0.01);
  for (double th : {0.1, 1.0, 3.0}) {
    const Complex v = c(std::polar(1.0, th));
    EXPECT_NEAR(v.real(), 5.0, 1e-12);
    EXPECT_NEAR(v.imag(), 0.0, 1e-12);
  }
}

TEST(ControllerZ, MatchesDirectFormula) {
  const double T = 0.006;
  const auto c = controller_z_tf(kBench, T);
  for (double th : {1e-3, 0.2, 1.3, 2.9}) {
    const Complex z = std::polar(1.0, th);
    const Complex ref = oracle::controller_direct(kBench.derivative_gain(), kBench.kp, T, z);
    EXPECT_LE(std::abs(c(z) - ref), 1e-12 * std::abs(ref));
  }
}

TEST(ControllerZ, ApproachesContinuousResponse) {
  for (auto kernel : {DerivativeKernel::BackwardDifference, DerivativeKernel::Tustin}) {
    for (double T : {1e-2, 1e-3, 1e-4}) {
      const double w = 1e-3 / T;
      const Complex got = controller_z_tf(kBench, T, kernel)(std::polar(1.0, w * T));
      const Complex ref{kBench.kp, kBench.derivative_gain() * w};
      EXPECT_LT(std::abs(got - ref) / std::abs(ref), 0.01);
    }
  }
}

TEST(PassivityRule, Examples) {
  EXPECT_DOUBLE_EQ(passivity_gain_rule(1.0, 4.0), 2.0);
  EXPECT_THROW(passivity_gain_rule(2.0, 0.0), ValidationError);
  EXPECT_THROW(passivity_gain_rule(0.0, 1.0), ValidationError);
  const double nu = 2.0 * 0.0005 / 8.4;
  EXPECT_NEAR(passivity_gain_rule(8.4, nu), 0.0005, 1e-15);
}

TEST(Gains, Validation) {
  EXPECT_NO_THROW(kBench.validate());
  EXPECT_THROW((ControllerGains{0.0, 1.0, 1.0, 0.0, {}}.validate()), ValidationError);
  EXPECT_THROW((ControllerGains{1.0, -1.0, 1.0, 0.0, {}}.validate()), ValidationError);
  EXPECT_THROW((ControllerGains{1.0, 1.0, 1.0, 0.0, 0.0}.validate()), ValidationError);
}

}  // namespace
}  // namespace teleop
