#pragma once

// Rational transfer functions in s and z, and the sampling kernels used by
// the stability test (hold factor, discrete derivative kernels, frequency
// grids up to Nyquist).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "teleop/error.hpp"

namespace teleop {

using Complex = std::complex<double>;

/// Real polynomial, coefficients stored in ascending powers.
///
/// Trailing (highest-order) zeros are trimmed on construction, so degree()
/// is the true degree. The zero polynomial has degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> ascending);
  Polynomial(std::initializer_list<double> ascending);

  static Polynomial constant(double c) { return Polynomial{c}; }
  /// (x - root)
  static Polynomial monic_linear(double root) { return Polynomial{-root, 1.0}; }

  const std::vector<double>& coefficients() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  double coefficient(std::size_t power) const noexcept {
    return power < c_.size() ? c_[power] : 0.0;
  }
  double leading() const noexcept { return c_.empty() ? 0.0 : c_.back(); }

  Complex operator()(Complex x) const noexcept;
  double operator()(double x) const noexcept;

  /// sum |c_i| |x|^i, the natural rounding scale of a Horner evaluation.
  double magnitude_scale(Complex x) const noexcept;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& p);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> c_;
};

struct LaplaceDomain {};
struct ZDomain {};

/// num/den over one complex variable. `Domain` only tags which variable
/// (s or z) the coefficients belong to so the two are never mixed.
template <class Domain>
class Rational {
 public:
  Rational(Polynomial num, Polynomial den);
  Rational(std::initializer_list<double> num, std::initializer_list<double> den)
      : Rational(Polynomial(num), Polynomial(den)) {}

  static Rational constant(double k) { return Rational({k}, {1.0}); }

  const Polynomial& num() const noexcept { return num_; }
  const Polynomial& den() const noexcept { return den_; }

  bool is_strictly_proper() const noexcept {
    return num_.degree() < den_.degree();
  }

  /// Throws PoleHit when |den(x)| is at rounding level.
  Complex operator()(Complex x) const;

  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  Polynomial num_;
  Polynomial den_;
};

using RationalTF = Rational<LaplaceDomain>;
using DiscreteTF = Rational<ZDomain>;

extern template class Rational<LaplaceDomain>;
extern template class Rational<ZDomain>;

Complex eval_tf(const RationalTF& tf, Complex s);
Complex eval_tf(const DiscreteTF& tf, Complex z);

/// Zero-order-hold factor (1 - e^{-sT}) / (sT).
Complex zoh_factor(Complex s, double T);

/// (z - 1) / (T z); the discrete derivative kernel of the z-domain controller.
Complex backward_diff_gain(Complex z, double T);

/// (2/T) (z - 1) / (z + 1); alternate derivative kernel for sensitivity runs.
Complex tustin_gain(Complex z, double T);

enum class DerivativeKernel { BackwardDifference, Tustin };

Complex derivative_kernel_gain(Complex z, double T, DerivativeKernel kernel);

enum class GridSpacing { Linear, Log };

struct ComplexResponse {
  double frequency;  // rad/s
  Complex value;
};

/// Strictly increasing frequencies in (0, pi/T], last point exactly pi/T.
class FrequencyGrid {
 public:
  FrequencyGrid(std::vector<double> points, double nyquist);

  std::span<const double> points() const& noexcept { return points_; }
  // A span into a temporary grid would dangle.
  std::span<const double> points() const&& = delete;
  double nyquist() const noexcept { return nyquist_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const noexcept { return points_[i]; }

 private:
  std::vector<double> points_;
  double nyquist_;
};

inline constexpr std::size_t kDefaultGridPoints = 512;
/// Log grids start this many decades-worth below Nyquist: pi / (T * 1e6).
inline constexpr double kLogGridSpan = 1e6;

FrequencyGrid make_grid(double T, std::size_t n_points = kDefaultGridPoints,
                        GridSpacing spacing = GridSpacing::Log);

std::vector<ComplexResponse> frequency_response(const RationalTF& tf,
                                                const FrequencyGrid& grid);
/// Evaluates at z = e^{j w T} for every grid frequency.
std::vector<ComplexResponse> frequency_response(const DiscreteTF& tf,
                                                const FrequencyGrid& grid,
                                                double T);

}  // namespace teleop
