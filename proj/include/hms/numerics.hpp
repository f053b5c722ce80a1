#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "hms/rational.hpp"

namespace hms {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultTol = 1e-12;
inline constexpr int kMaxDerivativeOrder = 16;

/// Complexified Kahler parameter tau = b_field + i * area shared by both sides.
class TorusModulus {
 public:
  static TorusModulus make(double b_field, double area);

  double b_field() const { return b_field_; }
  double area() const { return area_; }
  cplx tau() const { return {b_field_, area_}; }
  /// q = exp(2 pi i tau).
  cplx q() const;
  /// Modulus of the r-fold cover, r * tau.
  TorusModulus scaled(int r) const;

  friend bool operator==(const TorusModulus&, const TorusModulus&) = default;

 private:
  TorusModulus(double b, double a) : b_field_(b), area_(a) {}
  double b_field_ = 0.0;
  double area_ = 1.0;
};

/// Translation delta * tau + beta, kept split so the rational part stays exact.
struct Translation {
  Rational delta;
  double beta = 0.0;

  cplx value(const TorusModulus& tau) const { return delta.to_double() * tau.tau() + beta; }
  friend bool operator==(const Translation&, const Translation&) = default;
};

/// Parameters of theta[a, z0](level * tau, frequency * z).
///
/// The characteristic is reduced to [0, 1); shifting it by an integer only
/// relabels the summation index, so the series is unchanged.
struct ThetaParams {
  Rational characteristic;
  Translation translation;
  int level = 1;
  int frequency = 1;

  static ThetaParams make(Rational characteristic, Translation translation = {}, int level = 1,
                          int frequency = 1);
  friend bool operator==(const ThetaParams&, const ThetaParams&) = default;
};

struct SeriesValue {
  cplx value;
  /// Half-width of the summation window around the dominant index.
  int truncation = 0;
  /// Analytic bound on the discarded tail.
  double tail_bound = 0.0;
};

/// Sums D^order theta[a,z0](level tau, frequency z) with D = -(1/2 pi i) d/dz.
///
/// Terms are |t(c)| = |c f|^p exp(-pi L A c^2 - 2 pi c Im w) with c = m + a,
/// w = f z + z0, L the level and A = Im tau. Writing c = c* + r around the peak
/// c* = -Im w / (L A) gives |t| <= P(r) * C * exp(-pi L A r^2), and for r >= R the
/// ratio of consecutive bounds is at most rho(R) = ((R+|c*|+2)/(R+|c*|+1))^p
/// exp(-pi L A (2R+1)) < 1. Each side's tail is then <= P(R) C exp(-pi L A R^2)
/// / (1 - rho(R)); R grows until both tails together fall below tol or below the
/// rounding floor of the peak term.
SeriesValue theta_series(const ThetaParams& p, const TorusModulus& tau, cplx z, int order,
                         double tol);

cplx theta_eval(const ThetaParams& p, const TorusModulus& tau, cplx z, double tol = kDefaultTol);
cplx theta_deriv_eval(const ThetaParams& p, const TorusModulus& tau, cplx z, int order,
                      double tol = kDefaultTol);

/// Square complex matrix verified nilpotent at construction.
class NilpotentMatrix {
 public:
  static constexpr double kZeroThreshold = 1e-13;

  /// Zero matrix of the given size.
  static NilpotentMatrix zero(int dim);
  /// Single Jordan block with ones on the superdiagonal.
  static NilpotentMatrix jordan(int dim);
  static NilpotentMatrix make(CMatrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  int kernel_dim() const;
  bool indecomposable() const { return kernel_dim() == 1; }
  /// Nilpotency is preserved by scaling.
  NilpotentMatrix scaled(cplx s) const;

  friend bool operator==(const NilpotentMatrix& a, const NilpotentMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

 private:
  explicit NilpotentMatrix(CMatrix m) : entries_(std::move(m)) {}
  CMatrix entries_;
};

/// exp(t N) as the finite sum over j < dim.
CMatrix nilpotent_exp(const NilpotentMatrix& n, cplx t);

/// Basis of { f : f * m1 = m2 * f } (f is dim(m2) x dim(m1)).
///
/// The basis is the reduced-row-echelon nullspace of the vectorised operator,
/// one vector per free column, so equal solution spaces give identical bases.
std::vector<CMatrix> sylvester_kernel(const CMatrix& m1, const CMatrix& m2);

/// Snaps a value to zero when below the threshold (used to clean canonical bases).
inline cplx chop(cplx v, double eps = 1e-13) {
  return {std::abs(v.real()) < eps ? 0.0 : v.real(), std::abs(v.imag()) < eps ? 0.0 : v.imag()};
}

}  // namespace hms
