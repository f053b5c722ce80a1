#include "hms/fukaya.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "hms/error.hpp"

namespace hms {
namespace {

constexpr double kGradingSnap = 1e-9;

double snap(double v) {
  double r = std::round(v);
  return std::abs(v - r) < kGradingSnap ? r : v;
}

std::int64_t det(std::pair<std::int64_t, std::int64_t> u, std::pair<std::int64_t, std::int64_t> v) {
  return u.first * v.second - u.second * v.first;
}

Rational det(const Rational& ux, const Rational& uy, std::pair<std::int64_t, std::int64_t> v) {
  return ux * Rational(v.second) - uy * Rational(v.first);
}

double op_norm_bound(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

// Hom of local systems: eigenvalues exp(-2 pi i b) must agree, and then f M1 = M2 f iff f N1 = N2 f.
std::vector<CMatrix> local_system_hom(const Monodromy& m1, const Monodromy& m2) {
  const double d = m1.phase_b - m2.phase_b;
  if (std::abs(d - std::round(d)) > 1e-12) return {};
  return sylvester_kernel(m1.nil.matrix(), m2.nil.matrix());
}

std::string describe(const Brane& b) {
  return "slope " + std::to_string(b.slope().p) + "/" + std::to_string(b.slope().q) +
         " intercept " + b.intercept().str();
}

void require_same(const Brane& a, const Brane& b, const char* what) {
  require(a == b, errc::kEndpointMismatch, std::string(what) + ": " + describe(a) + " vs " + describe(b));
}

}  // namespace

Slope Slope::make(std::int64_t p, std::int64_t q) {
  require(p != 0 || q != 0, errc::kInvalidArgument, "slope (0, 0) is not a direction");
  if (q < 0 || (q == 0 && p < 0)) {
    p = -p;
    q = -q;
  }
  std::int64_t g = std::gcd(p, q);
  return {p / g, q / g};
}

CMatrix Monodromy::matrix() const {
  return std::exp(cplx(0.0, -2.0 * kPi * phase_b)) * nilpotent_exp(nil, 1.0);
}

CMatrix Monodromy::transport(double l) const {
  return std::exp(cplx(0.0, -2.0 * kPi * phase_b * l)) * nilpotent_exp(nil, l);
}

double Brane::principal_grading(Slope slope) {
  if (slope.is_vertical()) return 0.5;
  return std::atan2(static_cast<double>(slope.p), static_cast<double>(slope.q)) / kPi;
}

Brane Brane::make(Slope slope, Rational intercept, double alpha, Monodromy monodromy) {
  Slope s = Slope::make(slope.p, slope.q);
  require(std::isfinite(alpha) && std::isfinite(monodromy.phase_b), errc::kInvalidArgument,
          "brane grading and phase must be finite");
  double diff = alpha - principal_grading(s);
  require(std::abs(diff - std::round(diff)) < kGradingSnap, errc::kInvalidArgument,
          "grading is not a phase of the slope direction");
  Point base = s.is_horizontal() ? Point{Rational(0), intercept} : Point{intercept, Rational(0)};
  return through(s, base, alpha, std::move(monodromy));
}

Brane Brane::through(Slope slope, Point base, double alpha, Monodromy monodromy) {
  Slope s = Slope::make(slope.p, slope.q);
  double diff = alpha - principal_grading(s);
  require(std::abs(diff - std::round(diff)) < kGradingSnap, errc::kInvalidArgument,
          "grading is not a phase of the slope direction");
  Rational intercept;
  if (s.is_horizontal()) {
    intercept = base.y.frac();
  } else {
    Rational x = base.x - base.y * Rational(s.q, s.p);
    intercept = x.mod(Rational(1, s.p < 0 ? -s.p : s.p));
  }
  return Brane(s, intercept, alpha, std::move(monodromy));
}

Point Brane::base_point() const {
  if (slope_.is_horizontal()) return {Rational(0), intercept_};
  return {intercept_, Rational(0)};
}

int maslov(const Brane& l1, const Brane& l2) {
  return static_cast<int>(std::ceil(snap(l1.alpha() - l2.alpha())));
}

Brane shift(const Brane& o, int n) {
  return Brane::make(o.slope(), o.intercept(), o.alpha() + n, o.monodromy());
}

std::vector<Point> intersections(const Brane& l1, const Brane& l2) {
  require(!l1.same_geodesic(l2), errc::kNonTransversal,
          "identical geodesics: use intertwiner homs");
  const auto d1 = l1.slope().direction();
  const auto d2 = l2.slope().direction();
  const std::int64_t dd = det(d1, d2);
  std::vector<Point> out;
  if (dd == 0) return out;
  const std::int64_t count = dd < 0 ? -dd : dd;
  out.reserve(static_cast<std::size_t>(count));

  if (l1.slope().q == 1 && l2.slope().q == 1) {
    // y = n_i x + c_i with c_i the y-intercept; x_k = (c2 - c1 + k) / (n1 - n2).
    const std::int64_t n1 = l1.slope().p;
    const std::int64_t n2 = l2.slope().p;
    auto y_intercept = [](const Brane& b) {
      Point p = b.base_point();
      return p.y - Rational(b.slope().p) * p.x;
    };
    const Rational c1 = y_intercept(l1);
    const Rational c2 = y_intercept(l2);
    for (std::int64_t k = 0; k < count; ++k) {
      Rational x = (c2 - c1 + Rational(k)) / Rational(n1 - n2);
      out.push_back(Point::reduced(x, Rational(n1) * x + c1));
    }
    return out;
  }

  // General slopes: P1 + t d1 meets a lattice translate of L2 iff t in t0 + Z / |D|.
  const Point p1 = l1.base_point();
  const Point p2 = l2.base_point();
  const Rational t0 = det(p2.x - p1.x, p2.y - p1.y, d2) / Rational(dd);
  const Rational first = t0.mod(Rational(1, count));
  for (std::int64_t j = 0; j < count; ++j) {
    Rational t = first + Rational(j, count);
    out.push_back(Point::reduced(p1.x + t * Rational(d1.first), p1.y + t * Rational(d1.second)));
  }
  return out;
}

int hom_dim(const Brane& o1, const Brane& o2, int degree) {
  const double diff = snap(o2.alpha() + degree - o1.alpha());
  if (o1.same_geodesic(o2)) {
    if (diff != 0.0 && diff != 1.0) return 0;
    return static_cast<int>(local_system_hom(o1.monodromy(), o2.monodromy()).size());
  }
  if (!(diff >= 0.0 && diff < 1.0)) return 0;
  return static_cast<int>(intersections(o1, o2).size()) * o1.rank() * o2.rank();
}

int hom_dim(const BraneTuple& o1, const BraneTuple& o2, int degree) {
  int total = 0;
  for (const auto& a : o1.components)
    for (const auto& b : o2.components) total += hom_dim(a, b, degree);
  return total;
}

std::vector<CMatrix> intertwiner_hom(const Brane& o1, const Brane& o2) {
  require(o1.same_geodesic(o2), errc::kNonTransversal,
          "intertwiner homs need branes on the same geodesic");
  return local_system_hom(o1.monodromy(), o2.monodromy());
}

PointSum PointSum::make(Brane source, Brane target, std::vector<PointTerm> terms) {
  const auto pts = intersections(source, target);
  std::map<Point, CMatrix> merged;
  for (auto& t : terms) {
    require(t.coeff.rows() == target.rank() && t.coeff.cols() == source.rank(),
            errc::kInvalidArgument, "coefficient shape must be target rank x source rank");
    bool found = false;
    for (const auto& p : pts) found = found || p == t.point;
    require(found, errc::kInvalidArgument,
            "point (" + t.point.x.str() + ", " + t.point.y.str() + ") is not an intersection point");
    auto it = merged.find(t.point);
    if (it == merged.end()) merged.emplace(t.point, t.coeff);
    else it->second += t.coeff;
  }
  PointSum out{std::move(source), std::move(target), 0, {}};
  out.degree = maslov(out.source, out.target);
  for (const auto& p : pts) {
    auto it = merged.find(p);
    if (it != merged.end()) out.terms.push_back({p, it->second});
  }
  return out;
}

PointSum PointSum::zero(Brane source, Brane target) {
  std::vector<PointTerm> terms;
  for (const auto& p : intersections(source, target))
    terms.push_back({p, CMatrix::Zero(target.rank(), source.rank())});
  return make(std::move(source), std::move(target), std::move(terms));
}

CMatrix PointSum::coeff_at(const Point& p) const {
  for (const auto& t : terms)
    if (t.point == p) return t.coeff;
  return CMatrix::Zero(target.rank(), source.rank());
}

PointSum PointSum::scaled(cplx s) const {
  PointSum out = *this;
  for (auto& t : out.terms) t.coeff *= s;
  return out;
}

PointSum PointSum::operator+(const PointSum& other) const {
  require_same(source, other.source, "sum of morphisms with different sources");
  require_same(target, other.target, "sum of morphisms with different targets");
  std::vector<PointTerm> all = terms;
  all.insert(all.end(), other.terms.begin(), other.terms.end());
  return make(source, target, std::move(all));
}

PointSum m2(const PointSum& u1, const PointSum& u2, const TorusModulus& tau, double tol,
            M2Diagnostics* diagnostics) {
  require(tol > 0.0 && std::isfinite(tol), errc::kInvalidArgument, "tolerance must be positive");
  require_same(u1.target, u2.source, "m2 endpoints do not match");
  const Brane& l0 = u1.source;
  const Brane& l1 = u1.target;
  const Brane& l2 = u2.target;
  require(!l0.same_geodesic(l1) && !l1.same_geodesic(l2) && !l0.same_geodesic(l2),
          errc::kNonTransversal, "m2 needs three distinct geodesics; compose algebraically");

  const auto d0 = l0.slope().direction();
  const auto d1 = l1.slope().direction();
  const auto d2 = l2.slope().direction();
  const std::int64_t d12 = det(d1, d2);
  const std::int64_t d02 = det(d0, d2);
  const std::int64_t d10 = det(d1, d0);
  std::map<Point, CMatrix> acc;
  M2Diagnostics diag;

  if (d12 != 0 && d02 != 0 && d10 != 0 && !u1.terms.empty() && !u2.terms.empty()) {
    std::map<Point, const CMatrix*> second;
    for (const auto& t : u2.terms) second.emplace(t.point, &t.coeff);

    // Area = kappa r^2 with r = m - c1; transports grow at most like exp(lambda |r|).
    const double kappa = std::abs(static_cast<double>(d10)) /
                         (2.0 * std::abs(static_cast<double>(d12)) * std::abs(static_cast<double>(d02)));
    const double e0x = static_cast<double>(d0.first) / d02 - static_cast<double>(d1.first) / d12;
    const double e0y = static_cast<double>(d0.second) / d02 - static_cast<double>(d1.second) / d12;
    const double len2 = std::hypot(e0x, e0y) / std::hypot(d2.first, d2.second);
    const double lambda = op_norm_bound(l1.monodromy().nil.matrix()) / std::abs(static_cast<double>(d12)) +
                          op_norm_bound(l0.monodromy().nil.matrix()) / std::abs(static_cast<double>(d02)) +
                          op_norm_bound(l2.monodromy().nil.matrix()) * len2;
    double scale = 1.0;
    for (const auto& t : u1.terms) scale = std::max(scale, op_norm_bound(t.coeff));
    double scale2 = 1.0;
    for (const auto& t : u2.terms) scale2 = std::max(scale2, op_norm_bound(t.coeff));
    const double decay = 2.0 * kPi * tau.area() * kappa;
    const double budget = std::log(1e3 * scale * scale2 / tol);
    int window = 1;
    while (window < 100000 &&
           (decay * window * window - lambda * window < budget || 2.0 * decay * window < lambda))
      ++window;
    diag.window = 2 * window;

    const Point b2 = l2.base_point();
    const cplx two_pi_i_tau = cplx(0.0, 2.0 * kPi) * tau.tau();
    for (const auto& t1 : u1.terms) {
      const Point& p = t1.point;
      const Rational c1 = det(p.x - b2.x, p.y - b2.y, d2);
      const std::int64_t centre = static_cast<std::int64_t>(std::llround(c1.to_double()));
      for (std::int64_t m = centre - 2 * window - 1; m <= centre + 2 * window + 1; ++m) {
        const Rational r = Rational(m) - c1;
        const double rd = std::abs(r.to_double());
        if (rd > 2.0 * window) continue;
        const Rational s1 = r / Rational(d12);
        const Rational s0 = r / Rational(d02);
        const Rational qx = p.x + s1 * Rational(d1.first);
        const Rational qy = p.y + s1 * Rational(d1.second);
        auto hit = second.find(Point::reduced(qx, qy));
        if (hit == second.end()) continue;
        const Rational cross = s1 * s0 * Rational(d10);
        if (cross > Rational(0)) continue;  // counterclockwise cycle
        const Rational rx = p.x + s0 * Rational(d0.first);
        const Rational ry = p.y + s0 * Rational(d0.second);
        const Rational vx = rx - qx;
        const Rational vy = ry - qy;
        const Rational s2 = (vx * Rational(d2.first) + vy * Rational(d2.second)) /
                            Rational(d2.first * d2.first + d2.second * d2.second);
        const double area = -cross.to_double() / 2.0;
        const cplx weight = std::exp(two_pi_i_tau * area);
        CMatrix term = weight * (l2.monodromy().transport(s2.to_double()) * *hit->second *
                                 l1.monodromy().transport(s1.to_double()) * t1.coeff *
                                 l0.monodromy().transport(-s0.to_double()));
        if (rd > window) diag.annulus_norm += term.norm();
        Point out = Point::reduced(rx, ry);
        auto it = acc.find(out);
        if (it == acc.end()) acc.emplace(out, std::move(term));
        else it->second += term;
      }
    }
    require(diag.annulus_norm < tol, errc::kNotConverged,
            "m2 lattice sum did not converge within the enumeration window");
  }

  std::vector<PointTerm> terms;
  if (!l0.same_geodesic(l2) && d02 != 0) {
    for (const auto& p : intersections(l0, l2)) {
      auto it = acc.find(p);
      terms.push_back({p, it == acc.end() ? CMatrix::Zero(l2.rank(), l0.rank()) : it->second});
      if (it != acc.end()) acc.erase(it);
    }
  }
  require(acc.empty(), errc::kInvalidArgument, "m2 produced a vertex off the target intersection");
  if (diagnostics) *diagnostics = diag;
  return PointSum::make(l0, l2, std::move(terms));
}

PointSum compose(const Intertwiner& first, const PointSum& second) {
  require_same(first.target, second.source, "composition endpoints do not match");
  std::vector<PointTerm> terms = second.terms;
  for (auto& t : terms) t.coeff = t.coeff * first.map;
  return PointSum::make(first.source, second.target, std::move(terms));
}

PointSum compose(const PointSum& first, const Intertwiner& second) {
  require_same(first.target, second.source, "composition endpoints do not match");
  std::vector<PointTerm> terms = first.terms;
  for (auto& t : terms) t.coeff = second.map * t.coeff;
  return PointSum::make(first.source, second.target, std::move(terms));
}

Intertwiner compose(const Intertwiner& first, const Intertwiner& second) {
  require_same(first.target, second.source, "composition endpoints do not match");
  return {first.source, second.target, second.map * first.map};
}

TupleMorphism TupleMorphism::zero(BraneTuple source, BraneTuple target) {
  TupleMorphism out{std::move(source), std::move(target), {}};
  out.blocks.assign(out.target.components.size(),
                    std::vector<FukayaBlock>(out.source.components.size()));
  return out;
}

namespace {

FukayaBlock compose_block(const FukayaBlock& first, const FukayaBlock& second,
                          const TorusModulus& tau, double tol) {
  if (std::holds_alternative<std::monostate>(first) || std::holds_alternative<std::monostate>(second))
    return std::monostate{};
  if (auto* a = std::get_if<PointSum>(&first)) {
    if (auto* b = std::get_if<PointSum>(&second)) return m2(*a, *b, tau, tol);
    return compose(*a, std::get<Intertwiner>(second));
  }
  const auto& a = std::get<Intertwiner>(first);
  if (auto* b = std::get_if<PointSum>(&second)) return compose(a, *b);
  return compose(a, std::get<Intertwiner>(second));
}

void accumulate(FukayaBlock& into, FukayaBlock&& add) {
  if (std::holds_alternative<std::monostate>(add)) return;
  if (std::holds_alternative<std::monostate>(into)) {
    into = std::move(add);
    return;
  }
  if (auto* a = std::get_if<PointSum>(&into)) {
    *a = *a + std::get<PointSum>(add);
    return;
  }
  auto& a = std::get<Intertwiner>(into);
  const auto& b = std::get<Intertwiner>(add);
  require_same(a.source, b.source, "sum of intertwiners with different sources");
  require_same(a.target, b.target, "sum of intertwiners with different targets");
  a.map += b.map;
}

}  // namespace

TupleMorphism compose(const TupleMorphism& first, const TupleMorphism& second,
                      const TorusModulus& tau, double tol) {
  require(first.target == second.source, errc::kEndpointMismatch,
          "tuple composition endpoints do not match");
  const std::size_t ns = first.source.components.size();
  const std::size_t nm = first.target.components.size();
  const std::size_t nt = second.target.components.size();
  require(first.blocks.size() == nm && second.blocks.size() == nt, errc::kInvalidArgument,
          "tuple morphism block matrix has the wrong shape");
  TupleMorphism out = TupleMorphism::zero(first.source, second.target);
  for (std::size_t i = 0; i < nt; ++i) {
    require(second.blocks[i].size() == nm, errc::kInvalidArgument, "ragged block matrix");
    for (std::size_t k = 0; k < ns; ++k) {
      for (std::size_t j = 0; j < nm; ++j) {
        require(first.blocks[j].size() == ns, errc::kInvalidArgument, "ragged block matrix");
        accumulate(out.blocks[i][k], compose_block(first.blocks[j][k], second.blocks[i][j], tau, tol));
      }
    }
  }
  return out;
}

}  // namespace hms
