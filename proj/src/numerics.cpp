#include "hms/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hms/error.hpp"

namespace hms {

TorusModulus TorusModulus::make(double b_field, double area) {
  require(std::isfinite(b_field) && std::isfinite(area), errc::kInvalidArgument,
          "torus modulus must be finite");
  require(area > 0.0, errc::kInvalidArgument, "symplectic area must be positive (Im tau > 0)");
  return TorusModulus(b_field, area);
}

cplx TorusModulus::q() const { return std::exp(cplx(0.0, 2.0 * kPi) * tau()); }

TorusModulus TorusModulus::scaled(int r) const {
  require(r >= 1, errc::kInvalidArgument, "cover degree must be positive");
  return TorusModulus(b_field_ * r, area_ * r);
}

ThetaParams ThetaParams::make(Rational characteristic, Translation translation, int level,
                              int frequency) {
  require(level >= 1, errc::kInvalidArgument, "theta level must be >= 1");
  require(frequency >= 1, errc::kInvalidArgument, "theta frequency must be >= 1");
  return ThetaParams{characteristic.frac(), translation, level, frequency};
}

SeriesValue theta_series(const ThetaParams& p, const TorusModulus& tau, cplx z, int order,
                         double tol) {
  require(tol > 0.0 && std::isfinite(tol), errc::kInvalidArgument, "tolerance must be positive");
  require(order >= 0 && order <= kMaxDerivativeOrder, errc::kInvalidArgument,
          "derivative order outside [0, 16]");

  const double level_area = p.level * tau.area();
  const cplx big_tau = static_cast<double>(p.level) * tau.tau();
  const cplx w = static_cast<double>(p.frequency) * z + p.translation.value(tau);
  const double a = p.characteristic.to_double();
  const double freq = p.frequency;
  const double peak = -w.imag() / level_area;
  const double log_scale = kPi * level_area * peak * peak;
  const double abs_peak = std::abs(peak);

  auto poly = [&](double r) { return order == 0 ? 1.0 : std::pow(freq * (r + abs_peak + 1.0), order); };
  const double peak_size = std::exp(log_scale) * poly(0.0);

  int radius = 1;
  double tail = std::numeric_limits<double>::infinity();
  for (; radius < 100000; ++radius) {
    const double r = radius;
    const double rho = (order == 0 ? 1.0 : std::pow((r + abs_peak + 2.0) / (r + abs_peak + 1.0), order)) *
                       std::exp(-kPi * level_area * (2.0 * r + 1.0));
    if (rho >= 1.0) continue;
    tail = 2.0 * poly(r) * std::exp(log_scale - kPi * level_area * r * r) / (1.0 - rho);
    if (tail < tol || tail < 1e-17 * peak_size) break;
  }
  require(std::isfinite(tail), errc::kNotConverged, "theta series tail bound did not converge");

  const auto m_lo = static_cast<long>(std::ceil(peak - a - radius));
  const auto m_hi = static_cast<long>(std::floor(peak - a + radius));
  const cplx i_pi(0.0, kPi);
  cplx sum = 0.0;
  for (long m = m_lo; m <= m_hi; ++m) {
    const double c = static_cast<double>(m) + a;
    cplx term = std::exp(i_pi * (c * c * big_tau + 2.0 * c * w));
    if (order > 0) term *= std::pow(-c * freq, order);
    sum += term;
  }
  return SeriesValue{sum, radius, tail};
}

cplx theta_eval(const ThetaParams& p, const TorusModulus& tau, cplx z, double tol) {
  return theta_series(p, tau, z, 0, tol).value;
}

cplx theta_deriv_eval(const ThetaParams& p, const TorusModulus& tau, cplx z, int order,
                      double tol) {
  return theta_series(p, tau, z, order, tol).value;
}

NilpotentMatrix NilpotentMatrix::zero(int dim) {
  require(dim >= 1, errc::kInvalidArgument, "matrix dimension must be positive");
  return NilpotentMatrix(CMatrix::Zero(dim, dim));
}

NilpotentMatrix NilpotentMatrix::jordan(int dim) {
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; ++i) m(i, i + 1) = 1.0;
  return make(std::move(m));
}

NilpotentMatrix NilpotentMatrix::make(CMatrix entries) {
  require(entries.rows() >= 1 && entries.rows() == entries.cols(), errc::kInvalidArgument,
          "nilpotent matrix must be square and non-empty");
  CMatrix power = entries;
  for (Eigen::Index i = 1; i < entries.rows(); ++i) power = power * entries;
  const double scale = std::max(1.0, std::pow(entries.cwiseAbs().maxCoeff(), entries.rows()));
  require(power.cwiseAbs().maxCoeff() <= kZeroThreshold * scale, errc::kNotNilpotent,
          "matrix is not nilpotent");
  return NilpotentMatrix(std::move(entries));
}

int NilpotentMatrix::kernel_dim() const {
  Eigen::FullPivLU<CMatrix> lu(entries_);
  lu.setThreshold(1e-10);
  return dim() - static_cast<int>(lu.rank());
}

NilpotentMatrix NilpotentMatrix::scaled(cplx s) const { return NilpotentMatrix(entries_ * s); }

CMatrix nilpotent_exp(const NilpotentMatrix& n, cplx t) {
  const int d = n.dim();
  CMatrix result = CMatrix::Identity(d, d);
  CMatrix term = CMatrix::Identity(d, d);
  for (int j = 1; j < d; ++j) {
    term = term * n.matrix() * (t / static_cast<double>(j));
    result += term;
  }
  return result;
}

std::vector<CMatrix> sylvester_kernel(const CMatrix& m1, const CMatrix& m2) {
  require(m1.rows() == m1.cols() && m2.rows() == m2.cols(), errc::kInvalidArgument,
          "sylvester_kernel expects square matrices");
  const Eigen::Index d1 = m1.rows();
  const Eigen::Index d2 = m2.rows();
  const Eigen::Index n = d1 * d2;

  // vec(f m1 - m2 f) = (m1^T (x) I - I (x) m2) vec(f), column-major vec.
  CMatrix op = CMatrix::Zero(n, n);
  for (Eigen::Index c = 0; c < d1; ++c) {
    for (Eigen::Index r = 0; r < d2; ++r) {
      const Eigen::Index col = c * d2 + r;  // unknown f(r, c)
      for (Eigen::Index k = 0; k < d1; ++k) op(k * d2 + r, col) += m1(c, k);
      for (Eigen::Index k = 0; k < d2; ++k) op(c * d2 + k, col) -= m2(k, r);
    }
  }

  const double scale = std::max(1.0, n > 0 ? op.cwiseAbs().maxCoeff() : 0.0);
  const double eps = 1e-10 * scale;
  std::vector<Eigen::Index> pivot_cols;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < n && row < n; ++col) {
    Eigen::Index best = row;
    for (Eigen::Index i = row + 1; i < n; ++i)
      if (std::abs(op(i, col)) > std::abs(op(best, col))) best = i;
    if (std::abs(op(best, col)) <= eps) continue;
    op.row(row).swap(op.row(best));
    op.row(row) /= op(row, col);
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != row && op(i, col) != cplx(0.0)) op.row(i) -= op(i, col) * op.row(row);
    pivot_cols.push_back(col);
    ++row;
  }

  std::vector<CMatrix> basis;
  std::vector<bool> is_pivot(static_cast<size_t>(n), false);
  for (auto c : pivot_cols) is_pivot[static_cast<size_t>(c)] = true;
  for (Eigen::Index free = 0; free < n; ++free) {
    if (is_pivot[static_cast<size_t>(free)]) continue;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v(free) = 1.0;
    for (size_t i = 0; i < pivot_cols.size(); ++i)
      v(pivot_cols[i]) = chop(-op(static_cast<Eigen::Index>(i), free), 1e-12);
    CMatrix f(d2, d1);
    for (Eigen::Index c = 0; c < d1; ++c)
      for (Eigen::Index r = 0; r < d2; ++r) f(r, c) = v(c * d2 + r);
    basis.push_back(std::move(f));
  }
  return basis;
}

}  // namespace hms
