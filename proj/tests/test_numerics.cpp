#include <doctest.h>

#include <cmath>

#include "hms/error.hpp"
#include "hms/numerics.hpp"

using namespace hms;

namespace {

const TorusModulus kI = TorusModulus::make(0.0, 1.0);
const TorusModulus kSkew = TorusModulus::make(0.3, 1.2);
const ThetaParams kJacobi = ThetaParams::make(Rational(0));

// Plain summation over a very wide window; the independent oracle for the tail bound.
cplx brute_theta(double a, cplx z0, int level, int freq, const TorusModulus& t, cplx z, int order = 0) {
  cplx s = 0;
  for (int m = -60; m <= 60; ++m) {
    double c = m + a;
    cplx term = std::exp(cplx(0, kPi) * (c * c * (double(level) * t.tau()) + 2.0 * c * (double(freq) * z + z0)));
    s += std::pow(-c * freq, order) * term;
  }
  return s;
}

CMatrix series_exp(const CMatrix& n, cplx t) {
  CMatrix out = CMatrix::Identity(n.rows(), n.cols());
  CMatrix term = out;
  for (int j = 1; j < 40; ++j) {
    term = term * n * t / static_cast<double>(j);
    out += term;
  }
  return out;
}

}  // namespace

TEST_CASE("theta at the origin for tau = i") {
  const double expected = std::pow(kPi, 0.25) / std::tgamma(0.75);
  CHECK(std::abs(theta_eval(kJacobi, kI, 0.0) - expected) < 1e-14);
  CHECK(std::abs(theta_eval(kJacobi, kI, 0.0, 1e-15) - 1.0864348112133080) < 1e-14);
}

TEST_CASE("theta vanishes at the half period") {
  CHECK(std::abs(theta_eval(kJacobi, kI, cplx(0.5, 0.5))) < 1e-12);
  CHECK(std::abs(theta_eval(kJacobi, kSkew, 0.5 + 0.5 * kSkew.tau())) < 1e-12);
}

TEST_CASE("theta is even") {
  cplx z(0.3, 0.1);
  CHECK(std::abs(theta_eval(kJacobi, kI, z) - theta_eval(kJacobi, kI, -z)) < 1e-13);
}

TEST_CASE("tail bound matches wide summation") {
  for (const auto& t : {kI, kSkew}) {
    for (double a : {0.0, 1.0 / 3.0, 0.5}) {
      ThetaParams p = ThetaParams::make(Rational(static_cast<std::int64_t>(std::lround(a * 6)), 6),
                                        Translation{Rational(1, 4), 0.2}, 2, 3);
      for (cplx z : {cplx(0.1, -0.3), cplx(-0.4, 0.45), cplx(0.0, 0.0)}) {
        for (int order : {0, 1, 3}) {
          SeriesValue v = theta_series(p, t, z, order, 1e-12);
          cplx ref = brute_theta(a, p.translation.value(t), 2, 3, t, z, order);
          CHECK(std::abs(v.value - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
          CHECK(v.tail_bound < 1e-12 * std::max(1.0, std::abs(ref)));
        }
      }
    }
  }
}

TEST_CASE("quasi-periodicity and characteristic shift") {
  for (const auto& t : {kI, kSkew}) {
    for (double u = -0.5; u < 0.5; u += 0.125) {
      for (double v = -0.5; v < 0.5; v += 0.125) {
        cplx z = u + v * t.tau();
        cplx th = theta_eval(kJacobi, t, z);
        CHECK(std::abs(theta_eval(kJacobi, t, z + 1.0) - th) < 1e-12);
        cplx lhs = theta_eval(kJacobi, t, z + t.tau());
        cplx rhs = std::exp(cplx(0, -kPi) * (t.tau() + 2.0 * z)) * th;
        CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(rhs)));
        Rational a(1, 3);
        cplx shifted = theta_eval(ThetaParams::make(a), t, z);
        double ad = a.to_double();
        cplx expect = std::exp(cplx(0, kPi) * (ad * ad * t.tau() + 2.0 * ad * z)) *
                      theta_eval(kJacobi, t, z + ad * t.tau());
        CHECK(std::abs(shifted - expect) < 1e-11 * std::max(1.0, std::abs(expect)));
        CHECK(theta_eval(ThetaParams::make(Rational(4, 3)), t, z) == shifted);
      }
    }
  }
}

TEST_CASE("derivative operator") {
  CHECK(theta_deriv_eval(kJacobi, kI, 0.3, 0) == theta_eval(kJacobi, kI, 0.3));
  CHECK(std::abs(theta_deriv_eval(kJacobi, kI, 0.0, 1)) < 1e-13);
  // D = -(1 / 2 pi i) d/dz against a central difference.
  for (cplx z : {cplx(0.25, 0), cplx(0.1, 0.2), cplx(-0.3, -0.1)}) {
    const double h = 1e-5;
    cplx fd = (theta_eval(kJacobi, kSkew, z + h) - theta_eval(kJacobi, kSkew, z - h)) / (2 * h);
    cplx d = theta_deriv_eval(kJacobi, kSkew, z, 1);
    cplx expect = -fd / cplx(0, 2 * kPi);
    CHECK(std::abs(d - expect) < 1e-6 * std::abs(expect));
  }
  CHECK_THROWS_AS(theta_deriv_eval(kJacobi, kI, 0.0, 17), Error);
  CHECK_THROWS_AS(theta_eval(kJacobi, kI, 0.0, 0.0), Error);
  CHECK_THROWS_AS(TorusModulus::make(0.0, -1.0), Error);
}

TEST_CASE("nilpotent exponential") {
  CHECK(nilpotent_exp(NilpotentMatrix::zero(3), 5.0).isApprox(CMatrix::Identity(3, 3)));
  NilpotentMatrix j2 = NilpotentMatrix::jordan(2);
  CHECK((nilpotent_exp(j2, 1.0) - (CMatrix::Identity(2, 2) + j2.matrix())).norm() == 0.0);
  NilpotentMatrix j3 = NilpotentMatrix::jordan(3);
  CHECK((nilpotent_exp(j3, 2.0) - series_exp(j3.matrix(), 2.0)).norm() < 1e-14);
  CMatrix prod = nilpotent_exp(j3, cplx(0.3, 0.2)) * nilpotent_exp(j3, cplx(-1.1, 0.5));
  CHECK((prod - nilpotent_exp(j3, cplx(-0.8, 0.7))).norm() < 1e-14);
  CHECK(j3.kernel_dim() == 1);
  CHECK(j3.indecomposable());
  CHECK(NilpotentMatrix::zero(2).kernel_dim() == 2);
  CMatrix bad = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(NilpotentMatrix::make(bad), Error);
}

TEST_CASE("sylvester kernel") {
  for (int n : {1, 2, 3}) {
    CMatrix id = CMatrix::Identity(n, n);
    CHECK(sylvester_kernel(id, id).size() == static_cast<std::size_t>(n * n));
  }
  CMatrix m1 = CMatrix::Identity(1, 1) * std::exp(cplx(0, -2 * kPi * 0.3));
  CHECK(sylvester_kernel(m1, CMatrix::Identity(1, 1)).empty());

  CMatrix u = nilpotent_exp(NilpotentMatrix::jordan(2), 1.0);
  auto basis = sylvester_kernel(u, u);
  REQUIRE(basis.size() == 2);
  // Brute-force oracle: nullity of the explicit 4x4 operator.
  Eigen::MatrixXcd op(4, 4);
  for (int col = 0; col < 4; ++col) {
    CMatrix f = CMatrix::Zero(2, 2);
    f(col % 2, col / 2) = 1.0;
    CMatrix r = f * u - u * f;
    for (int i = 0; i < 4; ++i) op(i, col) = r(i % 2, i / 2);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(op);
  CHECK(lu.dimensionOfKernel() == 2);
  for (const auto& f : basis) CHECK((f * u - u * f).norm() < 1e-12);

  // Rectangular case: rank-1 into a unipotent rank-2 system.
  auto rect = sylvester_kernel(CMatrix::Identity(1, 1), u);
  REQUIRE(rect.size() == 1);
  CHECK(rect[0].rows() == 2);
  CHECK(rect[0].cols() == 1);
  CHECK((rect[0] * CMatrix::Identity(1, 1) - u * rect[0]).norm() < 1e-12);
}
