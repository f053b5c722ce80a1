#include "hms/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hms/error.hpp"

namespace hms {
namespace {

Monodromy split_monodromy(const Monodromy& m, int d, int j) {
  if (d == 1) return m;
  return {(m.phase_b + j) / d, m.nil.scaled(1.0 / d)};
}

Monodromy power(const Monodromy& m, int c) {
  if (c == 1) return m;
  return {m.phase_b * c, m.nil.scaled(static_cast<double>(c))};
}

int grading_shift(const Brane& o) {
  return static_cast<int>(std::lround(o.alpha() - Brane::principal_grading(o.slope())));
}

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

}  // namespace

// ---- objects ---------------------------------------------------------------

BraneTuple phi_object_tuple(const BundleDesc& a) {
  const Slope slope = Slope::make(a.degree, a.level);
  const std::int64_t g = std::gcd(iabs(a.degree), static_cast<std::int64_t>(a.level));
  const double alpha = Brane::principal_grading(slope) + a.shift;
  const Point base{Rational(0), -a.twist_a};
  const Monodromy m{a.twist_b, a.nil};
  BraneTuple out;
  for (int j = 0; j < g; ++j)
    out.components.push_back(Brane::through(slope, base, alpha, split_monodromy(m, static_cast<int>(g), j)));
  return out;
}

Brane phi_object(const BundleDesc& a) {
  BraneTuple t = phi_object_tuple(a);
  require(t.components.size() == 1, errc::kInvalidArgument,
          "mirror of this pushforward splits into several branes; use the tuple form");
  return t.components.front();
}

Brane phi_object(const TorsionDesc& s) {
  return Brane::make(Slope::vertical(), s.point_a, 0.5 + s.shift, Monodromy{s.point_b, s.nil});
}

MirrorPair MirrorPair::make(std::variant<BundleDesc, TorsionDesc> b, const TorusModulus& tau) {
  MirrorPair out{b, {}, tau};
  if (auto* bundle = std::get_if<BundleDesc>(&b)) out.aside = phi_object_tuple(*bundle);
  else out.aside = BraneTuple{{phi_object(std::get<TorsionDesc>(b))}};
  return out;
}

// ---- morphisms -------------------------------------------------------------

PointSum phi_morphism(const SectionElement& s, const TorusModulus& tau) {
  require(s.k > 0, errc::kInvalidArgument, "degree-0 homs map to intertwiners");
  require(s.source.level == 1 && s.target.level == 1, errc::kLevelMismatch,
          "morphism images are defined on level-1 bundles");
  const int k = s.k;
  require(k == s.target.degree - s.source.degree, errc::kDegreeMismatch, "section degree does not match endpoints");
  const Rational delta = (s.target.twist_a - s.source.twist_a) / Rational(k);
  const double beta = (s.target.twist_b - s.source.twist_b) / k;
  require(delta == s.delta && beta == s.beta, errc::kNotInBasis, "section translation is not canonical");
  const Brane l1 = phi_object(s.source);
  const Brane l2 = phi_object(s.target);
  const auto pts = intersections(l1, l2);

  const double dd = delta.to_double();
  const cplx scalar = std::exp(cplx(0.0, -kPi) * tau.tau() * (k * dd * dd)) *
                      std::exp(cplx(0.0, -2.0 * kPi * k * dd * beta));
  const CMatrix left = nilpotent_exp(s.target.nil, dd);
  const CMatrix right = nilpotent_exp(s.source.nil, -dd);

  std::vector<PointTerm> terms;
  for (const auto& t : s.terms) {
    require(t.theta.has_value(), errc::kNotInBasis, "positive-degree term without a theta factor");
    const Rational jr = t.theta->characteristic * Rational(k);
    require(jr.is_integer(), errc::kNotInBasis, "theta characteristic is not j/k");
    const int j = static_cast<int>(jr.num());
    require(*t.theta == basis_theta(k, j, delta, beta), errc::kNotInBasis, "term is not a canonical basis section");
    const Rational x = (delta + Rational(j, k)).frac();
    auto it = std::find_if(pts.begin(), pts.end(), [&](const Point& p) { return p.x == x; });
    require(it != pts.end(), errc::kNotInBasis, "no intersection point for basis index");
    terms.push_back({*it, scalar * (left * t.coeff * right)});
  }
  return PointSum::make(l1, l2, std::move(terms));
}

Intertwiner phi_intertwiner(const SectionElement& s) {
  require(s.k == 0, errc::kInvalidArgument, "only degree-0 homs are intertwiners");
  CMatrix f = CMatrix::Zero(s.target.fiber_dim(), s.source.fiber_dim());
  for (const auto& t : s.terms) f += t.coeff;
  return {phi_object(s.source), phi_object(s.target), f};
}

FukayaBlock phi_block(const SectionElement& s, const TorusModulus& tau) {
  if (s.k == 0) return phi_intertwiner(s);
  return phi_morphism(s, tau);
}

PointSum phi_bundle_torsion_morphism(const CMatrix& f, const BundleDesc& a, const TorsionDesc& s,
                                     const TorusModulus& tau) {
  require(a.level == 1, errc::kLevelMismatch, "bundle-to-torsion images are defined on level-1 bundles");
  require(f.rows() == s.fiber_dim() && f.cols() == a.fiber_dim(), errc::kInvalidArgument,
          "fiber map must be torsion fiber x bundle fiber");
  const double n = a.degree;
  const double al = a.twist_a.to_double();
  const double be = a.twist_b;
  const double pa = s.point_a.to_double();
  const double pb = s.point_b;
  const cplx scalar = std::exp(cplx(0.0, -kPi) * tau.tau() * (n * pa * pa - 2.0 * pa * al) +
                               cplx(0.0, 2.0 * kPi * (pa * be + pb * al - n * pa * pb)));
  const Rational ya = Rational(a.degree) * s.point_a - a.twist_a;
  CMatrix coeff = scalar * (nilpotent_exp(s.nil, ya.to_double()) * f * nilpotent_exp(a.nil, al));
  return PointSum::make(phi_object(a), phi_object(s), {{Point::reduced(s.point_a, ya), coeff}});
}

Intertwiner phi_torsion_morphism(const CMatrix& f, const TorsionDesc& s1, const TorsionDesc& s2) {
  return {phi_object(s1), phi_object(s2), f};
}

// ---- isogenies -------------------------------------------------------------

BraneTuple pushforward_brane(const Brane& o, int r) {
  require(r >= 1, errc::kInvalidArgument, "cover degree must be positive");
  const auto [q, p] = o.slope().direction();
  const std::int64_t d = std::gcd(r * q, iabs(p));
  const Slope image = Slope::make(p, r * q);
  const double alpha = Brane::principal_grading(image) + grading_shift(o);
  const Point b = o.base_point();
  const Point base{b.x * Rational(r), b.y};
  BraneTuple out;
  for (int j = 0; j < d; ++j)
    out.components.push_back(Brane::through(image, base, alpha, split_monodromy(o.monodromy(), static_cast<int>(d), j)));
  return out;
}

BraneTuple pushforward_brane(const BraneTuple& o, int r) {
  BraneTuple out;
  for (const auto& c : o.components)
    for (auto& b : pushforward_brane(c, r).components) out.components.push_back(std::move(b));
  return out;
}

BraneTuple pullback_brane(const Brane& o, int r) {
  require(r >= 1, errc::kInvalidArgument, "cover degree must be positive");
  const auto [q, p] = o.slope().direction();
  const std::int64_t g = std::gcd(q, static_cast<std::int64_t>(r));
  const Slope pre = Slope::make(r * p, q);
  const double alpha = Brane::principal_grading(pre) + grading_shift(o);
  const Monodromy m = power(o.monodromy(), static_cast<int>(r / g));
  const Point b = o.base_point();
  BraneTuple out;
  for (int i = 0; i < r && static_cast<std::int64_t>(out.components.size()) < g; ++i) {
    Brane c = Brane::through(pre, Point{(b.x + Rational(i)) / Rational(r), b.y}, alpha, m);
    bool seen = false;
    for (const auto& e : out.components) seen = seen || e.same_geodesic(c);
    if (!seen) out.components.push_back(std::move(c));
  }
  return out;
}

BraneTuple pullback_brane(const BraneTuple& o, int r) {
  BraneTuple out;
  for (const auto& c : o.components)
    for (auto& b : pullback_brane(c, r).components) out.components.push_back(std::move(b));
  return out;
}

// ---- verification ----------------------------------------------------------

namespace {

// Raw 64-bit draws mapped by hand so runs are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(g_() % static_cast<std::uint64_t>(n)); }
  std::uint64_t raw() { return g_(); }

 private:
  std::mt19937_64 g_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct Tracker {
  VerificationReport report;
  Tracker(std::string name, double tol, const VerifyOptions& opts) {
    report.name = std::move(name);
    report.tolerance = opts.tol.value_or(tol);
  }
  void add(double err) {
    ++report.cases;
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    report.max_error = std::max(report.max_error, err);
  }
  void fail_case() { add(std::numeric_limits<double>::infinity()); }
  VerificationReport done() {
    report.pass = report.cases > 0 && report.max_error < report.tolerance;
    return report;
  }
};

cplx random_point(Rng& rng, const TorusModulus& t) {
  return (rng.uniform() - 0.5) + (rng.uniform() - 0.5) * t.tau();
}

cplx theta0(const TorusModulus& t, cplx z) { return theta_eval(ThetaParams::make(Rational(0)), t, z, 1e-14); }


// (1 / 2 pi i) contour integral of theta'/theta around a fundamental parallelogram.
double zero_count_error(const TorusModulus& t) {
  static const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static const double wts[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
  const cplx c = -0.3 - 0.2 * t.tau();
  const cplx corners[5] = {c, c + 1.0, c + 1.0 + t.tau(), c + t.tau(), c};
  const ThetaParams p = ThetaParams::make(Rational(0));
  cplx total = 0;
  const int panels = 120;
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e], b = corners[e + 1];
    for (int i = 0; i < panels; ++i) {
      const cplx lo = a + (b - a) * (static_cast<double>(i) / panels);
      const cplx hi = a + (b - a) * (static_cast<double>(i + 1) / panels);
      for (int g = 0; g < 5; ++g) {
        const cplx z = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes[g];
        // theta'/theta = -2 pi i D theta / theta, so the count is -(1 / 2 pi i) * 2 pi i * int D theta / theta.
        total += wts[g] * 0.5 * (hi - lo) * (-theta_deriv_eval(p, t, z, 1, 1e-14) / theta_eval(p, t, z, 1e-14));
      }
    }
  }
  return std::abs(total - 1.0);
}

// Identities (i)-(v) plus the characteristic shift at one modulus. With `relative` the
// error is divided by max(1, |expected|), for moduli where theta values run large.
void theta_identities(Tracker& tr, Rng& rng, const TorusModulus& t, bool relative) {
  const cplx tt = t.tau();
  auto add = [&](cplx got, cplx want) {
    tr.add(std::abs(got - want) / (relative ? std::max(1.0, std::abs(want)) : 1.0));
  };
  for (int i = 0; i < 200; ++i) {
    const cplx z = random_point(rng, t);
    const cplx th = theta0(t, z);
    add(theta0(t, z + 1.0), th);
    add(theta0(t, z + tt), std::exp(cplx(0, -kPi) * (tt + 2.0 * z)) * th);
    add(theta0(t, -z), th);
    add(theta0(t, 0.5 * tt - z), std::exp(cplx(0, 2 * kPi) * z) * theta0(t, 0.5 * tt + z));
    for (Rational a : {Rational(1, 3), Rational(1, 2), Rational(5, 6)}) {
      const double ad = a.to_double();
      add(theta_eval(ThetaParams::make(a), t, z, 1e-14),
          std::exp(cplx(0, kPi) * (ad * ad * tt + 2.0 * ad * z)) * theta0(t, z + ad * tt));
    }
  }
  for (int k = -1; k <= 1; ++k) {
    for (int l = -1; l <= 1; ++l) {
      const cplx zero = 0.5 + 0.5 * tt + double(k) + double(l) * tt;
      // a zero is only as small as rounding of the surrounding values allows
      const double near = relative ? std::max(1.0, std::abs(theta0(t, zero + 0.25))) : 1.0;
      tr.add(std::abs(theta0(t, zero)) / near);
    }
  }
  tr.add(zero_count_error(t));
}

std::vector<VerificationReport> suite_theta(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 1));
  std::vector<VerificationReport> out;
  const TorusModulus fixed[2] = {TorusModulus::make(0.0, 1.0), TorusModulus::make(0.3, 1.2)};
  Tracker ident("theta-identities", 1e-10, opts);
  for (const auto& t : fixed) theta_identities(ident, rng, t, false);
  out.push_back(ident.done());
  if (!(opts.tau == fixed[0]) && !(opts.tau == fixed[1])) {
    Tracker user("theta-identities-at-tau", 1e-10, opts);
    theta_identities(user, rng, opts.tau, true);
    out.push_back(user.done());
  }

  Tracker add("addition-formula", 1e-8, opts);
  const Rational chars[3] = {Rational(0), Rational(1, 2), Rational(1, 3)};
  const TorusModulus& t = opts.tau;
  for (int n1 = 1; n1 <= 3; ++n1) {
    for (int n2 = 1; n2 <= 3; ++n2) {
      for (const auto& a : chars) {
        for (const auto& b : chars) {
          const int k = n1 + n2;
          for (int s = 0; s < 20; ++s) {
            const cplx z1 = random_point(rng, t), z2 = random_point(rng, t);
            const cplx lhs = theta_eval(ThetaParams::make(a / Rational(n1), {}, n1), t, z1, 1e-15) *
                             theta_eval(ThetaParams::make(b / Rational(n2), {}, n2), t, z2, 1e-15);
            cplx rhs = 0;
            for (int j = 0; j < k; ++j) {
              const Rational cj = Rational(j * n1) + a + b;
              rhs += theta_eval(ThetaParams::make(cj / Rational(k), {}, k), t, z1 + z2, 1e-15) *
                     theta_eval(ThetaParams::make((Rational(n2) * cj - Rational(k) * b) / Rational(n1 * n2 * k), {}, n1 * n2 * k),
                                t, double(n2) * z1 - double(n1) * z2, 1e-15);
            }
            add.add(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
          }
        }
      }
    }
  }

  Tracker special("addition-special-case", 1e-8, opts);
  const ThetaParams half = ThetaParams::make(Rational(1, 2), {}, 2);
  const ThetaParams two = ThetaParams::make(Rational(0), {}, 2);
  for (int s = 0; s < 20; ++s) {
    const cplx z = random_point(rng, t), x = random_point(rng, t);
    const cplx lhs = theta0(t, z) * theta0(t, z + x);
    const cplx rhs = theta_eval(two, t, x, 1e-15) * theta_eval(two, t, 2.0 * z + x, 1e-15) +
                     theta_eval(half, t, x, 1e-15) * theta_eval(half, t, 2.0 * z + x, 1e-15);
    special.add(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
  }
  out.push_back(add.done());
  out.push_back(special.done());
  return out;
}

Brane graded(std::int64_t p, std::int64_t q, Rational intercept, double phase = 0.0) {
  Slope s = Slope::make(p, q);
  return Brane::make(s, intercept, Brane::principal_grading(s), Monodromy{phase, NilpotentMatrix::zero(1)});
}

PointSum unit_sum(const Brane& a, const Brane& b) {
  std::vector<PointTerm> terms;
  for (const auto& p : intersections(a, b)) terms.push_back({p, CMatrix::Ones(b.rank(), a.rank())});
  return PointSum::make(a, b, terms);
}

double block_diff(const FukayaBlock& x, const FukayaBlock& y) {
  if (auto* a = std::get_if<PointSum>(&x)) {
    const auto& b = std::get<PointSum>(y);
    double worst = 0;
    for (const auto& p : intersections(a->source, a->target))
      worst = std::max(worst, (a->coeff_at(p) - b.coeff_at(p)).cwiseAbs().maxCoeff());
    return worst;
  }
  return (std::get<Intertwiner>(x).map - std::get<Intertwiner>(y).map).cwiseAbs().maxCoeff();
}

double block_size(const FukayaBlock& x) {
  if (auto* a = std::get_if<PointSum>(&x)) {
    double m = 0;
    for (const auto& t : a->terms) m = std::max(m, t.coeff.cwiseAbs().maxCoeff());
    return m;
  }
  return std::get<Intertwiner>(x).map.cwiseAbs().maxCoeff();
}

// Absolute below unit size, relative above: image coefficients grow like exp(pi A k delta^2).
double scaled_diff(const FukayaBlock& x, const FukayaBlock& y) {
  return block_diff(x, y) / std::max(1.0, block_size(y));
}

FukayaBlock compose_blocks(const FukayaBlock& first, const FukayaBlock& second, const TorusModulus& tau) {
  if (auto* a = std::get_if<PointSum>(&first)) {
    if (auto* b = std::get_if<PointSum>(&second)) return m2(*a, *b, tau, 1e-13);
    return compose(*a, std::get<Intertwiner>(second));
  }
  const auto& a = std::get<Intertwiner>(first);
  if (auto* b = std::get_if<PointSum>(&second)) return compose(a, *b);
  return compose(a, std::get<Intertwiner>(second));
}

}  // namespace

double functoriality_residual(const BundleDesc& a1, const BundleDesc& a2, const BundleDesc& a3,
                              const TorusModulus& tau, int* cases) {
  const HomBasis b12 = hom_basis(a1, a2);
  const HomBasis b23 = hom_basis(a2, a3);
  double worst = 0.0;
  int count = 0;
  if (b12.elements.empty() || b23.elements.empty()) {
    if (cases) *cases = 0;
    return 0.0;
  }
  if (b12.k == 0 || b23.k == 0) {
    for (const auto& s1 : b12.elements) {
      for (const auto& s2 : b23.elements) {
        FukayaBlock lhs = phi_block(compose(s1, s2, tau), tau);
        FukayaBlock rhs = compose_blocks(phi_block(s1, tau), phi_block(s2, tau), tau);
        worst = std::max(worst, scaled_diff(lhs, rhs));
        ++count;
      }
    }
    if (cases) *cases = count;
    return worst;
  }

  // The expansion is re-used for every pair. Its held-out guard only catches a basis that cannot fit;
  // the sampled products lose ~1e-10 relative at large Im tau, so it runs at the criterion level.
  const SectionExpander ex(a1, a3, tau, 1e-8);
  std::vector<cplx> pts = ex.samples();
  pts.insert(pts.end(), ex.held_out().begin(), ex.held_out().end());
  auto eval_all = [&](const HomBasis& b) {
    std::vector<std::vector<CMatrix>> v;
    for (const auto& e : b.elements) {
      std::vector<CMatrix> row;
      for (const auto& z : pts) row.push_back(section_eval(e, tau, z, 1e-14));
      v.push_back(std::move(row));
    }
    return v;
  };
  const auto v12 = eval_all(b12);
  const auto v23 = eval_all(b23);
  std::vector<PointSum> p12, p23;
  for (const auto& e : b12.elements) p12.push_back(phi_morphism(e, tau));
  for (const auto& e : b23.elements) p23.push_back(phi_morphism(e, tau));

  std::vector<CMatrix> values(pts.size());
  for (std::size_t i = 0; i < b12.elements.size(); ++i) {
    for (std::size_t j = 0; j < b23.elements.size(); ++j) {
      for (std::size_t z = 0; z < pts.size(); ++z) values[z] = v23[j][z] * v12[i][z];
      const PointSum lhs = phi_morphism(ex.expand(values), tau);
      const PointSum rhs = m2(p12[i], p23[j], tau, 1e-13);
      worst = std::max(worst, scaled_diff(lhs, rhs));
      ++count;
    }
  }
  if (cases) *cases = count;
  return worst;
}

namespace {

std::vector<VerificationReport> suite_simple(const VerifyOptions& opts) {
  const TorusModulus& t = opts.tau;
  const Rational x0(1, 5);
  const double beta = 0.15;
  struct Case {
    const char* name;
    Rational shift;
    double conn;
  };
  const Case cases[3] = {{"simple-m2-basic", Rational(0), 0.0},
                         {"simple-m2-shifted", x0, 0.0},
                         {"simple-m2-connection", x0, beta}};
  std::vector<VerificationReport> out;
  Tracker mirror("simple-through-mirror", 1e-9, opts);
  for (const auto& c : cases) {
    Tracker tr(c.name, 1e-10, opts);
    try {
      const Brane l0 = graded(0, 1, 0), l1 = graded(1, 1, 0), l2 = graded(2, 1, c.shift, c.conn);
      const PointSum r = m2(unit_sum(l0, l1), unit_sum(l1, l2), t, 1e-14);
      const cplx e1 = theta_eval(ThetaParams::make(c.shift, Translation{Rational(0), c.conn}, 2), t, 0.0, 1e-15);
      const cplx e2 = theta_eval(ThetaParams::make(c.shift + Rational(1, 2), Translation{Rational(0), c.conn}, 2), t, 0.0, 1e-15);
      tr.add(std::abs(r.coeff_at(Point::reduced(c.shift, 0)) (0, 0) - e1));
      tr.add(std::abs(r.coeff_at(Point::reduced(c.shift + Rational(1, 2), 0)) (0, 0) - e2));
      if (c.shift == Rational(0) && c.conn == 0.0) {
        cplx direct = 0;
        for (int n = -40; n <= 40; ++n) direct += std::exp(cplx(0, 2 * kPi) * t.tau() * double(n * n));
        tr.add(std::abs(r.terms[0].coeff(0, 0) - direct));
      }
      // Same composition on the complex side, pushed through the mirror.
      const BundleDesc o = BundleDesc::line(0), l = BundleDesc::line(1);
      const BundleDesc a2 = BundleDesc::make(2, c.shift * Rational(2), c.conn);
      int n = 0;
      mirror.add(functoriality_residual(o, l, a2, t, &n));
    } catch (const Error&) {
      tr.fail_case();
      mirror.fail_case();
    }
    out.push_back(tr.done());
  }
  out.push_back(mirror.done());
  return out;
}

Rational random_twist(Rng& rng) {
  const int den = 1 + rng.below(6);
  return Rational(rng.below(2 * den) - den, den);
}

NilpotentMatrix random_fiber(Rng& rng) {
  const int c = rng.below(20);
  if (c < 8) return NilpotentMatrix::zero(1);
  if (c < 17) return NilpotentMatrix::jordan(2);
  return NilpotentMatrix::zero(2);
}

std::vector<VerificationReport> suite_functoriality(const VerifyOptions& opts) {
  const TorusModulus& t = opts.tau;
  Tracker worked("functoriality-worked-triples", 1e-9, opts);
  const BundleDesc o = BundleDesc::line(0), l = BundleDesc::line(1);
  for (const auto& a3 : {BundleDesc::line(2), BundleDesc::make(2, Rational(2, 5), 0.0), BundleDesc::make(2, Rational(2, 5), 0.15)}) {
    try {
      worked.add(functoriality_residual(o, l, a3, t));
    } catch (const Error&) {
      worked.fail_case();
    }
  }

  Tracker sweep("functoriality-sweep", 1e-8, opts);
  Rng rng(mix_seed(opts.seed, 4));
  for (int trial = 0; trial < 50; ++trial) {
    int slopes[3];
    do {
      for (int& s : slopes) s = rng.below(6) - 1;  // integer slopes in [-1, 4]
      std::sort(slopes, slopes + 3);
    } while (slopes[0] == slopes[1] || slopes[1] == slopes[2]);
    BundleDesc a[3];
    for (int i = 0; i < 3; ++i) {
      const Rational ta = random_twist(rng);
      const Rational tb = random_twist(rng);
      a[i] = BundleDesc::make(slopes[i], ta, tb.to_double(), random_fiber(rng));
    }
    try {
      sweep.add(functoriality_residual(a[0], a[1], a[2], t));
    } catch (const Error&) {
      sweep.fail_case();
    }
  }

  // Bundle-to-torsion composites A1 -> A2 -> S, unipotent parts on every factor.
  Tracker mixed("bundle-torsion-functoriality", 1e-9, opts);
  const NilpotentMatrix torsion_fibers[] = {NilpotentMatrix::zero(1), NilpotentMatrix::jordan(2),
                                            NilpotentMatrix::jordan(3)};
  for (int trial = 0; trial < 20; ++trial) {
    const int n1 = rng.below(4) - 1;
    const int n2 = n1 + 1 + rng.below(3);
    const BundleDesc x = BundleDesc::make(n1, random_twist(rng), random_twist(rng).to_double(), random_fiber(rng));
    const BundleDesc y = BundleDesc::make(n2, random_twist(rng), random_twist(rng).to_double(), random_fiber(rng));
    const TorsionDesc s = TorsionDesc::make(random_twist(rng), random_twist(rng).to_double(), torsion_fibers[rng.below(3)]);
    try {
      CMatrix f(s.fiber_dim(), y.fiber_dim());
      for (auto& v : f.reshaped()) v = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
      const PointSum pf = phi_bundle_torsion_morphism(f, y, s, t);
      double worst = 0;
      for (const auto& e : hom_basis(x, y).elements) {
        const PointSum lhs = phi_bundle_torsion_morphism(compose_with_torsion(e, f, s, t, 1e-14), x, s, t);
        worst = std::max(worst, scaled_diff(lhs, m2(phi_morphism(e, t), pf, t, 1e-13)));
      }
      mixed.add(worst);
    } catch (const Error&) {
      mixed.fail_case();
    }
  }
  return {worked.done(), sweep.done(), mixed.done()};
}

// Random objects for the dimension laws: level-1 and pushed-forward bundles, torsion sheaves.
using BObject = std::variant<BundleDesc, TorsionDesc>;

BObject random_object(Rng& rng, bool allow_levels, bool allow_shift) {
  const int kind = rng.below(10);
  const int shift = allow_shift ? rng.below(3) - 1 : 0;
  if (kind < 2) {
    return TorsionDesc::make(Rational(rng.below(4), 4), 0.5 * rng.below(2), random_fiber(rng), shift);
  }
  const int level = allow_levels && kind >= 8 ? 2 + rng.below(2) : 1;
  const int n = rng.below(7) - 3;
  return BundleDesc::make(n, Rational(rng.below(4), 4), 0.5 * rng.below(2), random_fiber(rng), level, shift);
}

BraneTuple mirror_tuple(const BObject& b) {
  if (auto* a = std::get_if<BundleDesc>(&b)) return phi_object_tuple(*a);
  return BraneTuple{{phi_object(std::get<TorsionDesc>(b))}};
}

int bside_dim(const BObject& x, const BObject& y, int degree) {
  return std::visit([&](const auto& a, const auto& b) { return hom_dimension(a, b, degree); }, x, y);
}

std::vector<VerificationReport> suite_serre(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 5));
  Tracker basis("dims-intersections-vs-basis", kExactTolerance, opts);
  Tracker rr("riemann-roch", kExactTolerance, opts);
  Tracker serre_a("serre-duality-a-side", kExactTolerance, opts);
  Tracker serre_b("serre-duality-b-side", kExactTolerance, opts);
  Tracker mirror("dims-mirror", kExactTolerance, opts);
  for (int i = 0; i < 100; ++i) {
    // Level-1 unshifted bundle pair for the basis comparison.
    auto pick_bundle = [&]() {
      return BundleDesc::make(rng.below(7) - 3, Rational(rng.below(6), 6), rng.below(4) * 0.25, random_fiber(rng));
    };
    const BundleDesc x = pick_bundle(), y = pick_bundle();
    basis.add(std::abs(hom_dim(phi_object(x), phi_object(y), 0) - static_cast<int>(hom_basis(x, y).elements.size())));
    for (const auto& b : {x, y}) {
      const RiemannRoch r = riemann_roch_check(b);
      rr.add(std::abs(r.h0 - r.h1 - r.degree));
    }

    const BObject u = random_object(rng, true, true), v = random_object(rng, true, true);
    const BraneTuple au = mirror_tuple(u), av = mirror_tuple(v);
    serre_a.add(std::abs(hom_dim(au, av, 1) - hom_dim(av, au, 0)));
    serre_b.add(std::abs(bside_dim(u, v, 1) - bside_dim(v, u, 0)));
    for (int d : {0, 1}) mirror.add(std::abs(bside_dim(u, v, d) - hom_dim(au, av, d)));
    if (auto* bu = std::get_if<BundleDesc>(&u)) {
      const RiemannRoch r = riemann_roch_check(*bu);
      rr.add(std::abs(r.h0 - r.h1 - r.degree));
    }
  }
  return {basis.done(), rr.done(), serre_a.done(), serre_b.done(), mirror.done()};
}

Brane random_brane(Rng& rng) {
  const int c = rng.below(4);
  std::int64_t p, q;
  if (c == 0) {
    p = 1;
    q = 0;
  } else {
    q = 1 + rng.below(3);
    p = rng.below(9) - 4;
    if (std::gcd(iabs(p), q) != 1) p = 1;
  }
  const Slope s = Slope::make(p, q);
  const Rational intercept(rng.below(12), 12);
  const Monodromy m{0.25 * rng.below(4), rng.below(3) == 0 ? NilpotentMatrix::jordan(2) : NilpotentMatrix::zero(1)};
  return Brane::make(s, intercept, Brane::principal_grading(s) + (rng.below(3) - 1), m);
}

std::vector<VerificationReport> suite_isogeny(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 6));
  Tracker adj_a("adjunction-a-side", kExactTolerance, opts);
  Tracker adj_b("adjunction-b-side", kExactTolerance, opts);
  Tracker commute("phi-pushforward-commutes", kExactTolerance, opts);
  for (int r : {2, 3}) {
    for (int i = 0; i < 30; ++i) {
      const Brane base = random_brane(rng), cover = random_brane(rng);
      const BraneTuple bt{{base}}, ct{{cover}};
      for (int d : {0, 1}) {
        adj_a.add(std::abs(hom_dim(pullback_brane(base, r), ct, d) - hom_dim(bt, pushforward_brane(cover, r), d)));
        adj_a.add(std::abs(hom_dim(pushforward_brane(cover, r), bt, d) - hom_dim(ct, pullback_brane(base, r), d)));
      }

      const BundleDesc a = BundleDesc::make(rng.below(7) - 3, Rational(rng.below(6), 6), 0.25 * rng.below(4), random_fiber(rng));
      const BundleDesc b = BundleDesc::make(rng.below(9) - 4, Rational(rng.below(6), 6), 0.25 * rng.below(4), random_fiber(rng));
      const BundleDesc pa = pullback_bundle(a, r), pb = pushforward_bundle(b, r);
      for (int d : {0, 1}) {
        adj_b.add(std::abs(hom_dimension(pa, b, d) - hom_dimension(a, pb, d)));
        adj_b.add(std::abs(hom_dimension(pb, a, d) - hom_dimension(b, pa, d)));
      }
    }
    for (int i = 0; i < 20; ++i) {
      const BundleDesc b = BundleDesc::make(rng.below(9) - 4, random_twist(rng), random_twist(rng).to_double(),
                                            random_fiber(rng), 1, rng.below(3) - 1);
      commute.add(phi_object_tuple(pushforward_bundle(b, r)) == pushforward_brane(phi_object_tuple(b), r) ? 0.0 : 1.0);
    }
  }
  return {adj_a.done(), adj_b.done(), commute.done()};
}

std::vector<VerificationReport> suite_torsion(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 7));
  Tracker tables("torsion-composition-tables", kExactTolerance, opts);
  Tracker empty("torsion-distinct-support", kExactTolerance, opts);
  const NilpotentMatrix fibers[] = {NilpotentMatrix::zero(1), NilpotentMatrix::jordan(2), NilpotentMatrix::jordan(3),
                                    NilpotentMatrix::zero(2)};
  for (int trial = 0; trial < 40; ++trial) {
    const Rational pa(rng.below(5), 5);
    const double pb = 0.25 * rng.below(4);
    TorsionDesc s[3];
    for (auto& x : s) x = TorsionDesc::make(pa, pb, fibers[rng.below(4)]);
    const auto b12 = hom_torsion(s[0], s[1]), b23 = hom_torsion(s[1], s[2]);
    const Brane l[3] = {phi_object(s[0]), phi_object(s[1]), phi_object(s[2])};
    const auto a12 = intertwiner_hom(l[0], l[1]), a23 = intertwiner_hom(l[1], l[2]);
    if (b12.size() != a12.size() || b23.size() != a23.size()) {
      tables.fail_case();
      continue;
    }
    double worst = 0;
    for (std::size_t i = 0; i < b12.size(); ++i) worst = std::max(worst, (b12[i] - a12[i]).cwiseAbs().maxCoeff());
    for (std::size_t j = 0; j < b23.size(); ++j) worst = std::max(worst, (b23[j] - a23[j]).cwiseAbs().maxCoeff());
    for (const auto& f : b12) {
      for (const auto& g : b23) {
        const CMatrix bside = g * f;
        const Intertwiner aside = compose(phi_torsion_morphism(f, s[0], s[1]), phi_torsion_morphism(g, s[1], s[2]));
        worst = std::max(worst, (phi_torsion_morphism(bside, s[0], s[2]).map - aside.map).cwiseAbs().maxCoeff());
      }
    }
    tables.add(worst);

    const TorsionDesc other = TorsionDesc::make(pa, pb + 0.5, s[1].nil);
    const auto be = hom_torsion(s[0], other);
    const auto ae = intertwiner_hom(l[0], phi_object(other));
    empty.add(static_cast<double>(be.size() + ae.size()));
  }
  return {tables.done(), empty.done()};
}

std::vector<VerificationReport> suite_automorphy(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 8));
  Tracker tr("automorphy-twisted-sections", 1e-10, opts);
  const TorusModulus& t = opts.tau;
  for (int trial = 0; trial < 20; ++trial) {
    const int n1 = rng.below(3) - 1;
    const int n2 = n1 + 1 + rng.below(3);
    const BundleDesc a1 = BundleDesc::make(n1, random_twist(rng), random_twist(rng).to_double(),
                                           trial % 3 == 0 ? NilpotentMatrix::zero(1) : NilpotentMatrix::jordan(2));
    const BundleDesc a2 = BundleDesc::make(n2, random_twist(rng), random_twist(rng).to_double(), NilpotentMatrix::jordan(2));
    const HomBasis b = hom_basis(a1, a2);
    SectionElement s = b.elements[0].scaled(cplx(rng.uniform() - 0.5, rng.uniform() - 0.5));
    for (std::size_t i = 1; i < b.elements.size(); ++i)
      s = s + b.elements[i].scaled(cplx(rng.uniform() - 0.5, rng.uniform() - 0.5));
    const CMatrix left = nilpotent_exp(a2.nil, 1.0), right = nilpotent_exp(a1.nil, -1.0);
    for (int i = 0; i < 10; ++i) {
      const cplx z = random_point(rng, t);
      const CMatrix v = section_eval(s, t, z, 1e-14);
      const CMatrix p1 = section_eval(s, t, z + 1.0, 1e-14);
      tr.add((p1 - v).cwiseAbs().maxCoeff() / std::max(1.0, v.cwiseAbs().maxCoeff()));
      const CMatrix pred = automorphy_scalar(s, t, z) * left * v * right;
      const CMatrix pt = section_eval(s, t, z + t.tau(), 1e-14);
      tr.add((pt - pred).cwiseAbs().maxCoeff() / std::max(1.0, pred.cwiseAbs().maxCoeff()));
    }
  }
  return {tr.done()};
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"theta", "simple-example", "functoriality", "serre", "isogeny", "torsion", "automorphy"};
}

std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyOptions& opts) {
  if (opts.tol) require(*opts.tol > 0.0, errc::kInvalidArgument, "tolerance must be positive");
  if (suite == "all") {
    std::vector<VerificationReport> out;
    for (const auto& name : suite_names()) {
      auto part = run_suite(name, opts);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (suite == "theta") return suite_theta(opts);
  if (suite == "simple-example") return suite_simple(opts);
  if (suite == "functoriality") return suite_functoriality(opts);
  if (suite == "serre") return suite_serre(opts);
  if (suite == "isogeny") return suite_isogeny(opts);
  if (suite == "torsion") return suite_torsion(opts);
  if (suite == "automorphy") return suite_automorphy(opts);
  fail(errc::kInvalidArgument, "unknown suite: " + suite);
}

}  // namespace hms
