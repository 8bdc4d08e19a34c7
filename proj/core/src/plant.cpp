#include "teleop/plant.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace teleop {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void RobotParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw ValidationError("robot: mass must be > 0");
  if (!finite_nonneg(damping)) throw ValidationError("robot: damping must be >= 0");
}

void ImpedanceModel::validate() const {
  if (!finite_nonneg(mass) || !finite_nonneg(damping) || !finite_nonneg(stiffness))
    throw ValidationError("impedance: mass, damping and stiffness must be >= 0");
}

RationalTF ImpedanceModel::as_tf() const {
  if (is_free()) return RationalTF::constant(0.0);
  return RationalTF(Polynomial{stiffness, damping, mass}, Polynomial{0.0, 1.0});
}

void WallModel::validate() const {
  if (!std::isfinite(position)) throw ValidationError("wall: position must be finite");
  if (!(stiffness > 0.0) || !std::isfinite(stiffness))
    throw ValidationError("wall: stiffness must be > 0");
  if (!finite_nonneg(damping)) throw ValidationError("wall: damping must be >= 0");
}

RationalTF robot_impedance(const RobotParams& p) {
  return RationalTF(Polynomial{p.damping, p.mass}, Polynomial{1.0});
}

RationalTF plant_position_tf(const RobotParams& p, const ImpedanceModel& terminator) {
  const double m = p.mass + terminator.mass;
  const double b = p.damping + terminator.damping;
  const double k = terminator.stiffness;
  if (m == 0.0 && b == 0.0 && k == 0.0) {
    throw DegenerateModel("plant_position_tf: mass, damping and stiffness all zero");
  }
  return RationalTF(Polynomial{1.0}, Polynomial{k, b, m});
}

DiscreteTF sampled_plant_tf(const RationalTF& plant, double T) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw ValidationError("sampled_plant_tf: sampling period must be > 0");
  if (!plant.is_strictly_proper() || plant.num().is_zero()) {
    if (plant.num().is_zero()) return DiscreteTF::constant(0.0);
    throw ImproperPlant("sampled_plant_tf: plant must be strictly proper");
  }

  const int n = plant.den().degree();
  const double lead = plant.den().leading();

  // Controllable canonical form of num/den with den made monic.
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i + 1 < n; ++i) aug(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) aug(n - 1, j) = -plant.den().coefficient(j) / lead;
  aug(n - 1, n) = 1.0;  // B = e_n
  Eigen::RowVectorXd C(n);
  for (int j = 0; j < n; ++j) C(j) = plant.num().coefficient(j) / lead;

  const Eigen::MatrixXd E = (aug * T).exp();
  const Eigen::MatrixXd phi = E.topLeftCorner(n, n);
  const Eigen::VectorXd gamma = E.topRightCorner(n, 1);

  // Faddeev-LeVerrier: det(zI - Phi) = sum c_k z^k with c_n = 1, and
  // adj(zI - Phi) = sum_{k=1..n} M_k z^{n-k}, so num_{n-k} = C M_k Gamma.
  std::vector<double> den(n + 1, 0.0);
  std::vector<double> num(n, 0.0);
  den[n] = 1.0;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Mk = I;
  for (int k = 1; k <= n; ++k) {
    num[n - k] = (C * Mk * gamma)(0, 0);
    const Eigen::MatrixXd AM = phi * Mk;
    den[n - k] = -AM.trace() / static_cast<double>(k);
    Mk = AM + den[n - k] * I;
  }
  return DiscreteTF(Polynomial(std::move(num)), Polynomial(std::move(den)));
}

HybridMatrix hybrid_at(const RationalTF& Zm, const RationalTF& Zs,
                       const RationalTF& Cm, const RationalTF& Cs, double omega) {
  const Complex s{0.0, omega};
  const Complex zm = Zm(s);
  const Complex zs = Zs(s);
  const Complex cm = Cm(s);
  const Complex cs = Cs(s);
  const Complex loop = zs + cs;
  const double scale = std::abs(zs) + std::abs(cs);
  if (std::abs(loop) <= 64.0 * std::numeric_limits<double>::epsilon() * scale ||
      std::abs(loop) == 0.0) {
    throw SingularSlaveLoop("hybrid_at: Zs + Cs vanishes at the requested frequency");
  }
  HybridMatrix h;
  h.frequency = omega;
  h.h11 = zm + cm * zs / loop;
  h.h12 = cm / loop;
  h.h21 = -cs / loop;
  h.h22 = 1.0 / loop;
  return h;
}

double transparency_error(const HybridMatrix& h) {
  return std::abs(h.h11) + std::abs(h.h12 - 1.0) + std::abs(h.h21 + 1.0) + std::abs(h.h22);
}

double wall_force(double x, double v, const WallModel& wall) {
  if (!(x > wall.position)) return 0.0;
  return std::max(wall.stiffness * (x - wall.position) + wall.damping * v, 0.0);
}

}  // namespace teleop
