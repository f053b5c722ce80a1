#include "hms/sheaves.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numeric>

#include "hms/error.hpp"

namespace hms {
namespace {

constexpr double kTwistEps = 1e-12;

bool near_integer(double v) { return std::abs(v - std::round(v)) < kTwistEps; }

void require_level_one(const BundleDesc& a, const char* what) {
  require(a.level == 1, errc::kLevelMismatch,
          std::string(what) + " needs level-1 bundles; reduce pushforwards through the covers first");
}

double radical_inverse(unsigned i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * (i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// ad(f) = N2 f - f N1 and its powers until they vanish.
std::vector<CMatrix> ad_powers(const CMatrix& f, const CMatrix& n1, const CMatrix& n2) {
  std::vector<CMatrix> out{f};
  const int cap = static_cast<int>(n1.rows() + n2.rows());
  for (int p = 1; p < cap; ++p) {
    CMatrix next = n2 * out.back() - out.back() * n1;
    if (next.isZero(0.0)) break;
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace

BundleDesc BundleDesc::make(int degree, Rational twist_a, double twist_b, NilpotentMatrix nil, int level,
                            int shift) {
  require(level >= 1, errc::kInvalidArgument, "isogeny level must be >= 1");
  require(std::isfinite(twist_b), errc::kInvalidArgument, "twist must be finite");
  return BundleDesc{degree, twist_a, twist_b, std::move(nil), level, shift};
}

TorsionDesc TorsionDesc::make(Rational point_a, double point_b, NilpotentMatrix nil, int shift) {
  require(std::isfinite(point_b), errc::kInvalidArgument, "support point must be finite");
  return TorsionDesc{point_a, point_b, std::move(nil), shift};
}

SectionElement SectionElement::scaled(cplx s) const {
  SectionElement out = *this;
  for (auto& t : out.terms) t.coeff *= s;
  return out;
}

SectionElement SectionElement::operator+(const SectionElement& other) const {
  require(source == other.source && target == other.target, errc::kEndpointMismatch,
          "sum of sections with different endpoints");
  SectionElement out = *this;
  for (const auto& t : other.terms) {
    bool merged = false;
    for (auto& mine : out.terms) {
      if (mine.theta == t.theta) {
        mine.coeff += t.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.terms.push_back(t);
  }
  return out;
}

ThetaParams basis_theta(int k, int j, const Rational& delta, double beta) {
  return ThetaParams::make(Rational(j, k), Translation{delta * Rational(k), beta * k}, k, k);
}

HomBasis hom_basis(const BundleDesc& a1, const BundleDesc& a2) {
  require(a1.level == a2.level, errc::kLevelMismatch, "hom_basis needs bundles of the same isogeny level");
  require_level_one(a1, "hom_basis");
  HomBasis out;
  out.k = a2.degree - a1.degree;
  const int d1 = a1.fiber_dim();
  const int d2 = a2.fiber_dim();
  if (out.k < 0) return out;

  if (out.k == 0) {
    if (a1.twist_a == a2.twist_a && a1.twist_b == a2.twist_b) {
      for (auto& f : sylvester_kernel(a1.nil.matrix(), a2.nil.matrix()))
        out.elements.push_back(SectionElement{a1, a2, 0, Rational(0), 0.0, {{std::nullopt, f}}});
      return out;
    }
    require(!((a2.twist_a - a1.twist_a).is_integer() && near_integer(a2.twist_b - a1.twist_b)),
            errc::kInvalidArgument, "degree-0 twists differ by a lattice vector; normalise them first");
    return out;
  }

  out.delta = (a2.twist_a - a1.twist_a) / Rational(out.k);
  out.beta = (a2.twist_b - a1.twist_b) / out.k;
  for (int j = 0; j < out.k; ++j) {
    ThetaParams th = basis_theta(out.k, j, out.delta, out.beta);
    for (int r = 0; r < d2; ++r) {
      for (int c = 0; c < d1; ++c) {
        CMatrix e = CMatrix::Zero(d2, d1);
        e(r, c) = 1.0;
        out.elements.push_back(SectionElement{a1, a2, out.k, out.delta, out.beta, {{th, e}}});
      }
    }
  }
  return out;
}

CMatrix section_eval(const SectionElement& s, const TorusModulus& tau, cplx z, double tol) {
  const CMatrix& n1 = s.source.nil.matrix();
  const CMatrix& n2 = s.target.nil.matrix();
  CMatrix out = CMatrix::Zero(n2.rows(), n1.rows());
  for (const auto& term : s.terms) {
    if (!term.theta) {
      out += term.coeff;
      continue;
    }
    auto ads = ad_powers(term.coeff, n1, n2);
    double denom = 1.0;
    for (std::size_t p = 0; p < ads.size(); ++p) {
      if (p > 0) denom *= static_cast<double>(s.k) * static_cast<double>(p);
      cplx d = p == 0 ? theta_eval(*term.theta, tau, z, tol)
                      : theta_deriv_eval(*term.theta, tau, z, static_cast<int>(p), tol);
      out += (d / denom) * ads[p];
    }
  }
  return out;
}

CMatrix section_deriv_eval(const SectionElement& s, const TorusModulus& tau, cplx z, int order, double tol) {
  require(order >= 0, errc::kInvalidArgument, "derivative order must be non-negative");
  if (order == 0) return section_eval(s, tau, z, tol);
  const CMatrix& n1 = s.source.nil.matrix();
  const CMatrix& n2 = s.target.nil.matrix();
  CMatrix out = CMatrix::Zero(n2.rows(), n1.rows());
  for (const auto& term : s.terms) {
    if (!term.theta) continue;
    auto ads = ad_powers(term.coeff, n1, n2);
    double denom = 1.0;
    for (std::size_t p = 0; p < ads.size(); ++p) {
      if (p > 0) denom *= static_cast<double>(s.k) * static_cast<double>(p);
      out += (theta_deriv_eval(*term.theta, tau, z, order + static_cast<int>(p), tol) / denom) * ads[p];
    }
  }
  return out;
}

CMatrix compose_with_torsion(const SectionElement& s, const CMatrix& f, const TorsionDesc& t,
                             const TorusModulus& tau, double tol) {
  require(s.source.level == 1 && s.target.level == 1, errc::kLevelMismatch,
          "torsion composites are defined on level-1 bundles");
  require(f.rows() == t.fiber_dim() && f.cols() == s.target.fiber_dim(), errc::kInvalidArgument,
          "fiber map must be torsion fiber x bundle fiber");
  const double a = t.point_a.to_double();
  const cplx zeta = -a * tau.tau() - t.point_b;
  const CMatrix frame = f * nilpotent_exp(s.target.nil, a + s.target.twist_a.to_double());
  const CMatrix& np = t.nil.matrix();
  CMatrix g = CMatrix::Zero(t.fiber_dim(), s.source.fiber_dim());
  CMatrix power = CMatrix::Identity(np.rows(), np.cols());  // (-N')^p / p!
  for (int p = 0; p < t.fiber_dim(); ++p) {
    if (p > 0) power = (power * (-np)) / static_cast<double>(p);
    if (power.cwiseAbs().maxCoeff() == 0.0) break;
    g += power * frame * section_deriv_eval(s, tau, zeta, p, tol);
  }
  return g * nilpotent_exp(s.source.nil, -(a + s.source.twist_a.to_double()));
}

cplx automorphy_scalar(const SectionElement& s, const TorusModulus& tau, cplx z) {
  const cplx dx = (s.target.twist_a - s.source.twist_a).to_double() * tau.tau() +
                  (s.target.twist_b - s.source.twist_b);
  const double k = s.k;
  return std::exp(cplx(0.0, -2.0 * kPi) * dx) *
         std::exp(cplx(0.0, -kPi) * (k * tau.tau() + 2.0 * k * z));
}

struct SectionExpander::Factor {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd;
};

SectionExpander::SectionExpander(const BundleDesc& a1, const BundleDesc& a3, const TorusModulus& tau,
                                 double tol)
    : a1_(a1), a3_(a3), tau_(tau), tol_(tol), basis_(hom_basis(a1, a3)) {
  require(tol > 0.0, errc::kInvalidArgument, "tolerance must be positive");
  require(basis_.k > 0, errc::kDegreeMismatch, "numeric expansion needs a positive degree difference");
  const int d1 = a1.fiber_dim();
  const int d3 = a3.fiber_dim();
  const int block = d1 * d3;
  const int unknowns = static_cast<int>(basis_.elements.size());
  const int n_samples = 2 * basis_.k + 6;
  const int n_held = 4;

  const cplx t = tau.tau();
  const cplx zero_pt = 0.5 + 0.5 * t;
  for (unsigned i = 1; static_cast<int>(samples_.size() + held_out_.size()) < n_samples + n_held; ++i) {
    cplx z = (radical_inverse(i, 2) - 0.5) + (radical_inverse(i, 3) - 0.5) * t;
    bool near_zero = false;
    for (int du = -1; du <= 0; ++du)
      for (int dv = -1; dv <= 0; ++dv) near_zero = near_zero || std::abs(z - (zero_pt + double(du) + double(dv) * t)) < 1e-3;
    if (near_zero) continue;
    if (static_cast<int>(samples_.size()) < n_samples) samples_.push_back(z);
    else held_out_.push_back(z);
  }

  Eigen::MatrixXcd design(n_samples * block, unknowns);
  weights_.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    std::vector<CMatrix> vals;
    double scale = 0.0;
    for (const auto& e : basis_.elements) {
      vals.push_back(section_eval(e, tau, samples_[i], tol * 1e-3));
      scale = std::max(scale, vals.back().cwiseAbs().maxCoeff());
    }
    weights_[i] = scale > 0.0 ? 1.0 / scale : 1.0;
    for (int b = 0; b < unknowns; ++b)
      for (int r = 0; r < d3; ++r)
        for (int c = 0; c < d1; ++c) design(i * block + r * d1 + c, b) = weights_[i] * vals[b](r, c);
  }
  auto f = std::make_shared<Factor>();
  f->svd.compute(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = f->svd.singularValues();
  condition_ = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  require(condition_ <= 1e8, errc::kIllConditioned, "sample design is ill-conditioned; resample");
  factor_ = std::move(f);

  for (const auto& z : held_out_) {
    std::vector<CMatrix> vals;
    for (const auto& e : basis_.elements) vals.push_back(section_eval(e, tau, z, tol * 1e-3));
    held_out_basis_.push_back(std::move(vals));
  }
}

SectionElement SectionExpander::expand(const std::vector<CMatrix>& values) const {
  const int d1 = a1_.fiber_dim();
  const int d3 = a3_.fiber_dim();
  const int block = d1 * d3;
  const std::size_t ns = samples_.size();
  require(values.size() == ns + held_out_.size(), errc::kInvalidArgument,
          "expected one value per sample and held-out point");
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(ns) * block);
  for (std::size_t i = 0; i < ns; ++i) {
    require(values[i].rows() == d3 && values[i].cols() == d1, errc::kInvalidArgument,
            "sampled value has the wrong shape");
    for (int r = 0; r < d3; ++r)
      for (int c = 0; c < d1; ++c) rhs(static_cast<Eigen::Index>(i) * block + r * d1 + c) = weights_[i] * values[i](r, c);
  }
  Eigen::VectorXcd coef = factor_->svd.solve(rhs);

  for (std::size_t h = 0; h < held_out_.size(); ++h) {
    const CMatrix& want = values[ns + h];
    CMatrix got = CMatrix::Zero(d3, d1);
    // rounding is relative to the terms being summed, which can dwarf the value itself
    double terms = 0.0;
    for (std::size_t b = 0; b < held_out_basis_[h].size(); ++b) {
      got += coef(static_cast<Eigen::Index>(b)) * held_out_basis_[h][b];
      terms += std::abs(coef(static_cast<Eigen::Index>(b))) * held_out_basis_[h][b].cwiseAbs().maxCoeff();
    }
    const double scale = std::max({1.0, want.cwiseAbs().maxCoeff(), terms});
    const double resid = (got - want).cwiseAbs().maxCoeff();
    if (!(resid <= tol_ * scale)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "held-out residual %.3g of the basis expansion exceeds %.3g (relative scale %.3g)",
                    resid, tol_ * scale, scale);
      throw Error(errc::kNotConverged, msg);
    }
  }

  SectionElement out{a1_, a3_, basis_.k, basis_.delta, basis_.beta, {}};
  std::size_t idx = 0;
  for (int j = 0; j < basis_.k; ++j) {
    CMatrix c = CMatrix::Zero(d3, d1);
    for (int r = 0; r < d3; ++r)
      for (int cc = 0; cc < d1; ++cc) c(r, cc) = coef(static_cast<Eigen::Index>(idx++));
    out.terms.push_back({basis_theta(basis_.k, j, basis_.delta, basis_.beta), c});
  }
  return out;
}

namespace {

CMatrix constant_part(const SectionElement& s) {
  CMatrix out = CMatrix::Zero(s.target.fiber_dim(), s.source.fiber_dim());
  for (const auto& t : s.terms) out += t.coeff;
  return out;
}

}  // namespace

SectionElement compose(const SectionElement& s1, const SectionElement& s2, const TorusModulus& tau, double tol) {
  require(s1.target == s2.source, errc::kEndpointMismatch, "composition endpoints do not match");
  if (s1.k == 0) {
    SectionElement out = s2;
    out.source = s1.source;
    const CMatrix f = constant_part(s1);
    for (auto& t : out.terms) t.coeff = t.coeff * f;
    return out;
  }
  if (s2.k == 0) {
    SectionElement out = s1;
    out.target = s2.target;
    const CMatrix f = constant_part(s2);
    for (auto& t : out.terms) t.coeff = f * t.coeff;
    return out;
  }
  SectionExpander ex(s1.source, s2.target, tau, tol);
  std::vector<CMatrix> values;
  for (const auto& z : ex.samples()) values.push_back(section_eval(s2, tau, z, tol * 1e-3) * section_eval(s1, tau, z, tol * 1e-3));
  for (const auto& z : ex.held_out()) values.push_back(section_eval(s2, tau, z, tol * 1e-3) * section_eval(s1, tau, z, tol * 1e-3));
  return ex.expand(values);
}

SectionElement compose_closed_scalar(const SectionElement& s1, const SectionElement& s2, const TorusModulus& tau,
                                     double tol) {
  require(s1.target == s2.source, errc::kEndpointMismatch, "composition endpoints do not match");
  require(s1.source.fiber_dim() == 1 && s1.target.fiber_dim() == 1 && s2.target.fiber_dim() == 1,
          errc::kInvalidArgument, "closed-form composition needs scalar coefficients");
  require(s1.k > 0 && s2.k > 0, errc::kDegreeMismatch, "closed-form composition needs positive degrees");
  require_level_one(s1.source, "compose_closed_scalar");
  const int k1 = s1.k, k2 = s2.k, kk = k1 + k2;
  const HomBasis target = hom_basis(s1.source, s2.target);
  std::vector<cplx> acc(kk, 0.0);
  const Rational dd = Rational(k1 * k2) * (s1.delta - s2.delta);
  const double db = static_cast<double>(k1 * k2) * (s1.beta - s2.beta);
  for (const auto& t1 : s1.terms) {
    for (const auto& t2 : s2.terms) {
      require(t1.theta && t2.theta, errc::kInvalidArgument, "closed-form composition needs theta terms");
      const Rational c1 = t1.theta->characteristic * Rational(k1);
      const Rational c2 = t2.theta->characteristic * Rational(k2);
      require(c1.is_integer() && c2.is_integer(), errc::kNotInBasis, "term is not a canonical basis section");
      const std::int64_t j1 = c1.num(), j2 = c2.num();
      const cplx scale = t1.coeff(0, 0) * t2.coeff(0, 0);
      for (int j = 0; j < kk; ++j) {
        const std::int64_t cj = static_cast<std::int64_t>(j) * k1 + j1 + j2;
        ThetaParams second = ThetaParams::make(Rational(k2 * cj - kk * j2, static_cast<std::int64_t>(k1) * k2 * kk),
                                               Translation{dd, db}, k1 * k2 * kk, 1);
        const std::int64_t idx = ((cj % kk) + kk) % kk;
        acc[static_cast<std::size_t>(idx)] += scale * theta_eval(second, tau, 0.0, tol * 1e-3);
      }
    }
  }
  SectionElement out{s1.source, s2.target, kk, target.delta, target.beta, {}};
  for (int j = 0; j < kk; ++j)
    out.terms.push_back({basis_theta(kk, j, target.delta, target.beta), CMatrix::Constant(1, 1, acc[j])});
  return out;
}

std::vector<CMatrix> hom_torsion(const TorsionDesc& s1, const TorsionDesc& s2) {
  if (!(s1.point_a - s2.point_a).is_integer() || !near_integer(s1.point_b - s2.point_b)) return {};
  return sylvester_kernel(s1.nil.matrix(), s2.nil.matrix());
}

BundleTorsionHom hom_bundle_torsion(const BundleDesc& a, const TorsionDesc& s) {
  BundleTorsionHom out;
  out.tag = "fiber-hom";
  const int ra = a.rank();
  const int rs = s.fiber_dim();
  out.dim = ra * rs;
  for (int r = 0; r < rs; ++r) {
    for (int c = 0; c < ra; ++c) {
      CMatrix e = CMatrix::Zero(rs, ra);
      e(r, c) = 1.0;
      out.basis.push_back(e);
    }
  }
  return out;
}

BundleTorsionHom hom_torsion_bundle(const TorsionDesc&, const BundleDesc&) { return {0, "zero", {}}; }

RiemannRoch riemann_roch_check(const BundleDesc& a) {
  RiemannRoch rr;
  BundleDesc unshifted = a;
  unshifted.shift = 0;
  if (a.level == 1) {
    const BundleDesc o = BundleDesc::line(0);
    rr.h0 = static_cast<int>(hom_basis(o, unshifted).elements.size());
    rr.h1 = static_cast<int>(hom_basis(unshifted, o).elements.size());
  } else {
    const BundleDesc o = BundleDesc::line(0);
    rr.h0 = hom_dimension(o, unshifted, 0);
    rr.h1 = hom_dimension(o, unshifted, 1);
  }
  rr.degree = a.total_degree();
  rr.rank = a.rank();
  return rr;
}

BundleDesc pullback_bundle(const BundleDesc& a, int c) {
  require(c >= 1, errc::kInvalidArgument, "cover degree must be positive");
  require_level_one(a, "pullback_bundle");
  return BundleDesc::make(a.degree * c, a.twist_a, a.twist_b * c, a.nil.scaled(static_cast<double>(c)), 1, a.shift);
}

BundleDesc pushforward_bundle(const BundleDesc& a, int r) {
  require(r >= 1, errc::kInvalidArgument, "cover degree must be positive");
  BundleDesc out = a;
  out.level = a.level * r;
  return out;
}

CMatrix flat_pushforward(const CMatrix& a, int r) {
  require(r >= 1, errc::kInvalidArgument, "cover degree must be positive");
  require(a.rows() == a.cols(), errc::kInvalidArgument, "flat factor must be square");
  const Eigen::Index d = a.rows();
  CMatrix out = CMatrix::Zero(d * r, d * r);
  for (int i = 0; i + 1 < r; ++i) out.block(i * d, (i + 1) * d, d, d) = CMatrix::Identity(d, d);
  out.block((r - 1) * d, 0, d, d) = a;
  return out;
}

CMatrix flat_pullback(const CMatrix& a, int r) {
  require(r >= 1, errc::kInvalidArgument, "cover degree must be positive");
  CMatrix out = CMatrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < r; ++i) out = out * a;
  return out;
}

namespace {

// dim Hom between level-1 bundles on a common curve, allowing twists that differ by lattice vectors.
int level_one_hom_dim(const BundleDesc& b1, const BundleDesc& b2) {
  const int k = b2.degree - b1.degree;
  if (k > 0) return k * b1.fiber_dim() * b2.fiber_dim();
  if (k < 0) return 0;
  if (!(b2.twist_a - b1.twist_a).is_integer() || !near_integer(b2.twist_b - b1.twist_b)) return 0;
  return static_cast<int>(sylvester_kernel(b1.nil.matrix(), b2.nil.matrix()).size());
}

// Hom(pi_{r1*} B1, pi_{r2*} B2) = sum over the gcd(r1, r2) components E_{R tau} of the fibre product,
// component nu embedding as (z + nu tau, z).
int degree_zero_hom(const BundleDesc& a1, const BundleDesc& a2) {
  const int r1 = a1.level, r2 = a2.level;
  const int big = std::lcm(r1, r2);
  const int g = std::gcd(r1, r2);
  BundleDesc b1 = a1, b2 = a2;
  b1.level = b2.level = 1;
  b1.shift = b2.shift = 0;
  const BundleDesc p1 = pullback_bundle(b1, big / r1);
  const BundleDesc p2 = pullback_bundle(b2, big / r2);
  int total = 0;
  for (int nu = 0; nu < g; ++nu) {
    BundleDesc t = p1;
    t.twist_a = p1.twist_a + Rational(static_cast<std::int64_t>(p1.degree) * nu, big);
    total += level_one_hom_dim(t, p2);
  }
  return total;
}

}  // namespace

int hom_dimension(const BundleDesc& a1, const BundleDesc& a2, int degree) {
  const int ext = degree + a2.shift - a1.shift;
  if (ext == 0) return degree_zero_hom(a1, a2);
  if (ext == 1) return degree_zero_hom(a2, a1);
  return 0;
}

int hom_dimension(const TorsionDesc& s1, const TorsionDesc& s2, int degree) {
  const int ext = degree + s2.shift - s1.shift;
  if (ext == 0) return static_cast<int>(hom_torsion(s1, s2).size());
  if (ext == 1) return static_cast<int>(hom_torsion(s2, s1).size());
  return 0;
}

int hom_dimension(const BundleDesc& a, const TorsionDesc& s, int degree) {
  const int ext = degree + s.shift - a.shift;
  return ext == 0 ? hom_bundle_torsion(a, s).dim : 0;
}

int hom_dimension(const TorsionDesc& s, const BundleDesc& a, int degree) {
  const int ext = degree + a.shift - s.shift;
  return ext == 1 ? hom_bundle_torsion(a, s).dim : 0;
}

}  // namespace hms
