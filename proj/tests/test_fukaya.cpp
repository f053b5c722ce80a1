#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hms/error.hpp"
#include "hms/fukaya.hpp"

using namespace hms;

namespace {

const TorusModulus kI = TorusModulus::make(0.0, 1.0);

Brane line(std::int64_t p, std::int64_t q, Rational intercept, double phase = 0.0,
           NilpotentMatrix nil = NilpotentMatrix::zero(1)) {
  Slope s = Slope::make(p, q);
  return Brane::make(s, intercept, Brane::principal_grading(s), Monodromy{phase, nil});
}

PointSum unit_at_all(const Brane& a, const Brane& b) {
  std::vector<PointTerm> terms;
  for (const auto& p : intersections(a, b))
    terms.push_back({p, CMatrix::Ones(b.rank(), a.rank())});
  return PointSum::make(a, b, terms);
}

cplx theta_const(Rational a, double beta, const TorusModulus& t, int level) {
  return theta_eval(ThetaParams::make(a, Translation{Rational(0), beta}, level), t, 0.0, 1e-15);
}

// Oracle: intersect lattice translates of both lines in the plane and reduce mod Z^2.
std::set<std::pair<double, double>> brute_intersections(const Brane& a, const Brane& b) {
  auto da = a.slope().direction();
  auto db = b.slope().direction();
  Point pa = a.base_point();
  Point pb = b.base_point();
  std::set<std::pair<double, double>> out;
  double det = static_cast<double>(da.first * db.second - da.second * db.first);
  for (int i = -8; i <= 8; ++i) {
    for (int j = -8; j <= 8; ++j) {
      double ox = pb.x.to_double() + i - pa.x.to_double();
      double oy = pb.y.to_double() + j - pa.y.to_double();
      double t = (ox * db.second - oy * db.first) / det;
      double x = pa.x.to_double() + t * da.first;
      double y = pa.y.to_double() + t * da.second;
      x -= std::floor(x + 1e-12);
      y -= std::floor(y + 1e-12);
      out.insert({std::round(x * 1e9) / 1e9, std::round(y * 1e9) / 1e9});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("maslov index") {
  auto graded = [](double alpha) {
    return Brane::make(Slope::integer(0), Rational(0), alpha, Monodromy::trivial());
  };
  CHECK(maslov(graded(0.0), graded(0.0)) == 0);
  CHECK(maslov(graded(0.0), graded(1.0)) == -1);
  CHECK(maslov(graded(0.0), graded(-1.0)) == 1);
  Brane a = Brane::make(Slope::integer(0), Rational(0), 0.0, Monodromy::trivial());
  Brane b = line(1, 1, 0);
  CHECK(maslov(b, a) == 1);  // 0.25 - 0 rounds up
  CHECK(maslov(a, b) == 0);
  CHECK_THROWS_AS(Brane::make(Slope::integer(1), Rational(0), 0.3, Monodromy::trivial()), Error);
}

TEST_CASE("shift") {
  Brane b = line(1, 1, 0);
  CHECK(shift(b, 1).alpha() == doctest::Approx(1.25));
  CHECK(shift(b, 0) == b);
  CHECK(shift(shift(b, 1), -1) == b);
}

TEST_CASE("canonical intercepts") {
  Brane a = Brane::through(Slope::integer(2), Point{Rational(0), Rational(1, 2)}, Brane::principal_grading(Slope::integer(2)),
                           Monodromy::trivial());
  CHECK(a.intercept() == Rational(1, 4));
  CHECK(a.axis() == InterceptAxis::X);
  Brane b = line(2, 1, Rational(3, 4));
  CHECK(a == b);  // 3/4 reduces mod 1/2
  Brane h = Brane::through(Slope::integer(0), Point{Rational(1, 3), Rational(7, 5)}, 0.0, Monodromy::trivial());
  CHECK(h.axis() == InterceptAxis::Y);
  CHECK(h.intercept() == Rational(2, 5));
  Brane v = line(1, 0, Rational(5, 3));
  CHECK(v.alpha() == 0.5);
  CHECK(v.intercept() == Rational(2, 3));
}

TEST_CASE("intersections of integer slopes") {
  auto pts = intersections(line(0, 1, 0), line(2, 1, 0));
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] == Point{Rational(0), Rational(0)});
  CHECK(pts[1] == Point{Rational(1, 2), Rational(0)});
  auto one = intersections(line(1, 1, 0), line(2, 1, 0));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Point{Rational(0), Rational(0)});
  auto shifted = intersections(line(0, 1, 0), line(2, 1, Rational(1, 5)));
  REQUIRE(shifted.size() == 2);
  CHECK(shifted[0].x == Rational(1, 5));
  CHECK(shifted[1].x == Rational(7, 10));
  CHECK(intersections(line(1, 1, 0), line(1, 1, Rational(1, 2))).empty());
  CHECK_THROWS_AS(intersections(line(1, 1, 0), line(1, 1, 0)), Error);
}

TEST_CASE("intersections agree with the lattice-translate oracle") {
  std::vector<Brane> lines = {line(0, 1, Rational(1, 3)), line(1, 1, Rational(1, 5)),
                              line(3, 1, Rational(1, 6)), line(-2, 1, Rational(1, 7)),
                              line(1, 0, Rational(2, 5)), line(1, 2, Rational(1, 4)),
                              line(-3, 2, Rational(1, 9)), line(2, 3, Rational(0))};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (i == j) continue;
      auto pts = intersections(lines[i], lines[j]);
      auto d1 = lines[i].slope().direction();
      auto d2 = lines[j].slope().direction();
      std::int64_t det = d1.first * d2.second - d1.second * d2.first;
      CHECK(pts.size() == static_cast<std::size_t>(det < 0 ? -det : det));
      std::set<std::pair<double, double>> got;
      for (const auto& p : pts)
        got.insert({std::round(p.x.to_double() * 1e9) / 1e9, std::round(p.y.to_double() * 1e9) / 1e9});
      CHECK(got.size() == pts.size());
      CHECK(got == brute_intersections(lines[i], lines[j]));
    }
  }
}

TEST_CASE("hom dimensions") {
  CHECK(hom_dim(line(0, 1, 0), line(1, 1, 0), 0) == 1);
  CHECK(hom_dim(line(1, 1, 0), line(1, 1, 0), 0) == 1);
  Brane j2 = line(0, 1, 0, 0.0, NilpotentMatrix::jordan(2));
  CHECK(hom_dim(j2, line(2, 1, 0), 0) == 4);
  // Degree 0 only in the increasing-phase direction.
  CHECK(hom_dim(line(2, 1, 0), line(0, 1, 0), 0) == 0);
  CHECK(hom_dim(line(2, 1, 0), line(0, 1, 0), 1) == 2);
  // Serre duality on a sample of pairs.
  std::vector<Brane> objs = {line(0, 1, 0), line(1, 1, Rational(1, 3)), j2, line(1, 0, Rational(1, 2)),
                             line(1, 1, Rational(1, 3), 0.25), line(-1, 1, 0)};
  for (const auto& a : objs)
    for (const auto& b : objs) CHECK(hom_dim(a, b, 1) == hom_dim(b, a, 0));
  BraneTuple t{{line(0, 1, 0), line(1, 1, 0)}};
  CHECK(hom_dim(t, BraneTuple{{line(2, 1, 0)}}, 0) == 3);
  CHECK(hom_dim(BraneTuple{}, t, 0) == 0);
}

TEST_CASE("intertwiners") {
  CHECK(intertwiner_hom(line(1, 1, 0, 0.2), line(1, 1, 0, 0.2)).size() == 1);
  CHECK(intertwiner_hom(line(1, 1, 0, 0.2), line(1, 1, 0, 0.3)).empty());
  Brane j2 = line(1, 1, 0, 0.0, NilpotentMatrix::jordan(2));
  CHECK(intertwiner_hom(j2, j2).size() == 2);
  CHECK_THROWS_AS(intertwiner_hom(line(1, 1, 0), line(2, 1, 0)), Error);
}

TEST_CASE("m2 on the basic triangle") {
  const Rational x0(1, 5);
  const double beta = 0.15;
  for (const auto& t : {kI, TorusModulus::make(0.3, 1.2)}) {
    for (auto [shift_x, conn] : {std::pair{Rational(0), 0.0}, std::pair{x0, 0.0}, std::pair{x0, beta}}) {
      Brane l0 = line(0, 1, 0);
      Brane l1 = line(1, 1, 0);
      Brane l2 = line(2, 1, shift_x, conn);
      M2Diagnostics diag;
      PointSum r = m2(unit_at_all(l0, l1), unit_at_all(l1, l2), t, 1e-13, &diag);
      REQUIRE(r.terms.size() == 2);
      CHECK(r.terms[0].point.x == shift_x);
      CHECK(r.terms[1].point.x == shift_x + Rational(1, 2));
      cplx e1 = theta_const(shift_x, conn, t, 2);
      cplx e2 = theta_const(shift_x + Rational(1, 2), conn, t, 2);
      CHECK(std::abs(r.terms[0].coeff(0, 0) - e1) < 1e-12);
      CHECK(std::abs(r.terms[1].coeff(0, 0) - e2) < 1e-12);
      CHECK(diag.annulus_norm < 1e-13);
    }
  }
  // Positive series with zero B-field: sum of exp(-2 pi n^2).
  PointSum base = m2(unit_at_all(line(0, 1, 0), line(1, 1, 0)), unit_at_all(line(1, 1, 0), line(2, 1, 0)), kI);
  double direct = 0;
  for (int n = -10; n <= 10; ++n) direct += std::exp(-2 * kPi * n * n);
  CHECK(base.terms[0].coeff(0, 0).real() == doctest::Approx(direct).epsilon(1e-14));
  CHECK(std::abs(base.terms[0].coeff(0, 0).imag()) < 1e-15);
  CHECK(base.terms[1].coeff(0, 0).real() > 0);
}

TEST_CASE("m2 errors") {
  Brane l0 = line(0, 1, 0);
  Brane l1 = line(1, 1, 0);
  Brane l2 = line(2, 1, 0);
  CHECK_THROWS_WITH_AS(m2(unit_at_all(l0, l1), unit_at_all(l0, l2), kI), doctest::Contains("endpoints"), Error);
  try {
    m2(unit_at_all(l0, l1), unit_at_all(l0, l2), kI);
  } catch (const Error& e) {
    CHECK(e.code() == errc::kEndpointMismatch);
  }
  CHECK_THROWS_AS(m2(unit_at_all(l0, l1), unit_at_all(l1, l2), kI, 0.0), Error);
  try {
    m2(unit_at_all(l0, l1), unit_at_all(l1, l0), kI);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::kNonTransversal);
  }
}

TEST_CASE("m2 bilinearity and associativity") {
  const TorusModulus t = TorusModulus::make(0.3, 1.2);
  Brane l0 = line(0, 1, Rational(1, 3), 0.1);
  Brane l1 = line(1, 1, Rational(1, 5), -0.2);
  Brane l2 = line(2, 1, Rational(1, 6), 0.35);
  Brane l3 = line(4, 1, Rational(1, 12), 0.05);
  auto u1 = unit_at_all(l0, l1);
  auto u2 = unit_at_all(l1, l2);
  std::vector<PointTerm> t3;
  int i = 0;
  for (const auto& p : intersections(l2, l3)) t3.push_back({p, CMatrix::Constant(1, 1, cplx(1.0 + i++, 0.5))});
  auto u3 = PointSum::make(l2, l3, t3);

  cplx a(0.7, -1.3);
  auto lhs = m2(u1.scaled(a), u2, t);
  auto rhs = m2(u1, u2, t).scaled(a);
  for (std::size_t k = 0; k < lhs.terms.size(); ++k)
    CHECK((lhs.terms[k].coeff - rhs.terms[k].coeff).norm() < 1e-12);

  auto left = m2(m2(u1, u2, t), u3, t);
  auto right = m2(u1, m2(u2, u3, t), t);
  REQUIRE(left.terms.size() == 4);
  for (std::size_t k = 0; k < left.terms.size(); ++k) {
    CHECK(left.terms[k].point == right.terms[k].point);
    CHECK((left.terms[k].coeff - right.terms[k].coeff).norm() < 1e-10);
  }
}

TEST_CASE("m2 associativity with unipotent local systems and rational slopes") {
  const TorusModulus t = TorusModulus::make(-0.2, 0.9);
  NilpotentMatrix j2 = NilpotentMatrix::jordan(2);
  Brane l0 = line(-1, 1, Rational(1, 4), 0.1, j2);
  Brane l1 = line(1, 2, Rational(1, 3), 0.4);
  Brane l2 = line(3, 2, Rational(1, 7), -0.3, j2);
  Brane l3 = line(1, 0, Rational(2, 5), 0.2);
  auto make = [](const Brane& a, const Brane& b, double seed) {
    std::vector<PointTerm> terms;
    int n = 0;
    for (const auto& p : intersections(a, b)) {
      CMatrix c(b.rank(), a.rank());
      for (int r = 0; r < c.rows(); ++r)
        for (int s = 0; s < c.cols(); ++s) c(r, s) = cplx(std::sin(seed + n + 3 * r + 7 * s), std::cos(seed * n + r - s));
      terms.push_back({p, c});
      ++n;
    }
    return PointSum::make(a, b, terms);
  };
  auto u1 = make(l0, l1, 0.3);
  auto u2 = make(l1, l2, 1.7);
  auto u3 = make(l2, l3, 2.9);
  auto left = m2(m2(u1, u2, t), u3, t);
  auto right = m2(u1, m2(u2, u3, t), t);
  REQUIRE(left.terms.size() == right.terms.size());
  double worst = 0;
  for (std::size_t k = 0; k < left.terms.size(); ++k)
    worst = std::max(worst, (left.terms[k].coeff - right.terms[k].coeff).norm());
  CHECK(worst < 1e-9);
}

TEST_CASE("algebraic compositions and tuples") {
  Brane l0 = line(0, 1, 0, 0.0, NilpotentMatrix::jordan(2));
  Brane l1 = line(1, 1, 0);
  auto basis = intertwiner_hom(l0, l0);
  REQUIRE(basis.size() == 2);
  Intertwiner f{l0, l0, basis[1]};
  PointSum u = unit_at_all(l0, l1);
  PointSum fu = compose(f, u);
  CHECK((fu.terms[0].coeff - u.terms[0].coeff * basis[1]).norm() == 0.0);
  Intertwiner id{l1, l1, CMatrix::Identity(1, 1)};
  CHECK((compose(u, id).terms[0].coeff - u.terms[0].coeff).norm() == 0.0);
  CHECK((compose(f, f).map - basis[1] * basis[1]).norm() == 0.0);

  Brane l2 = line(2, 1, 0);
  BraneTuple src{{l0}};
  BraneTuple mid{{l1, l2}};
  BraneTuple dst{{line(3, 1, 0)}};
  auto a = TupleMorphism::zero(src, mid);
  a.blocks[0][0] = unit_at_all(l0, l1);
  a.blocks[1][0] = unit_at_all(l0, l2);
  auto b = TupleMorphism::zero(mid, dst);
  b.blocks[0][0] = unit_at_all(l1, dst.components[0]);
  b.blocks[0][1] = unit_at_all(l2, dst.components[0]);
  auto c = compose(a, b, kI);
  auto expect = m2(unit_at_all(l0, l1), unit_at_all(l1, dst.components[0]), kI) +
                m2(unit_at_all(l0, l2), unit_at_all(l2, dst.components[0]), kI);
  const auto& got = std::get<PointSum>(c.blocks[0][0]);
  for (std::size_t k = 0; k < expect.terms.size(); ++k)
    CHECK((got.terms[k].coeff - expect.terms[k].coeff).norm() < 1e-15);
}
