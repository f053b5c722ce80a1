#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hms/numerics.hpp"
#include "hms/rational.hpp"

namespace hms {

/// Indecomposable bundle in Atiyah form pi_{r*}(L(phi) (x) F(V, exp N)) on E_tau.
///
/// The inner bundle lives on the r-fold cover E_{r tau}; with tau' = r tau its
/// automorphy factor is phi(z) = exp(-2 pi i x) phi0(z)^n, phi0(z) = exp(-pi i tau' - 2 pi i z),
/// x = twist_a tau' + twist_b, and the flat factor is exp(nil). Twists are kept as given:
/// a shift of twist_a by an integer yields an isomorphic bundle whose theta basis differs
/// by a non-constant factor, so no normalisation is applied.
struct BundleDesc {
  int degree = 0;
  Rational twist_a;
  double twist_b = 0.0;
  NilpotentMatrix nil = NilpotentMatrix::zero(1);
  int level = 1;
  int shift = 0;  // position in the derived category, A[shift]

  static BundleDesc make(int degree, Rational twist_a, double twist_b,
                         NilpotentMatrix nil = NilpotentMatrix::zero(1), int level = 1, int shift = 0);
  /// The trivial bundle O and the theta line bundle L^n.
  static BundleDesc line(int degree) { return make(degree, Rational(0), 0.0); }

  int fiber_dim() const { return nil.dim(); }
  int rank() const { return level * fiber_dim(); }
  /// Degree of the pushforward to E_tau.
  int total_degree() const { return degree * fiber_dim(); }

  friend bool operator==(const BundleDesc&, const BundleDesc&) = default;
};

/// Torsion sheaf S(zeta0, V, N) supported at zeta0 = -point_a tau - point_b.
struct TorsionDesc {
  Rational point_a;
  double point_b = 0.0;
  NilpotentMatrix nil = NilpotentMatrix::zero(1);
  int shift = 0;

  static TorsionDesc make(Rational point_a, double point_b, NilpotentMatrix nil = NilpotentMatrix::zero(1),
                          int shift = 0);
  int fiber_dim() const { return nil.dim(); }

  friend bool operator==(const TorsionDesc&, const TorsionDesc&) = default;
};

/// theta (x) coeff; a missing theta marks the constant term of a degree-0 (intertwiner) hom.
struct SectionTerm {
  std::optional<ThetaParams> theta;
  CMatrix coeff;  // Hom(V1, V2): target fiber x source fiber
};

/// Morphism of level-1 bundles: sum of translated theta sections with matrix coefficients.
///
/// Evaluation applies the twist S(z) = sum_p D^p theta(z) / (k^p p!) ad^p(coeff), with
/// ad(f) = N2 f - f N1, so S(z + 1) = S(z) and
/// S(z + tau) = exp(-2 pi i (x2 - x1)) phi0(z)^k exp(N2) S(z) exp(-N1).
struct SectionElement {
  BundleDesc source;
  BundleDesc target;
  int k = 0;
  Rational delta;     // (a2 - a1) / k
  double beta = 0.0;  // (b2 - b1) / k
  std::vector<SectionTerm> terms;

  SectionElement scaled(cplx s) const;
  SectionElement operator+(const SectionElement& other) const;
};

struct HomBasis {
  int k = 0;
  Rational delta;
  double beta = 0.0;
  std::vector<SectionElement> elements;
};

/// Canonical basis of Hom(A1, A2) for level-1 bundles: index j of theta[j/k, 0](k tau,
/// k(z + delta tau + beta)) outermost, then elementary matrices E_rc in row-major order.
HomBasis hom_basis(const BundleDesc& a1, const BundleDesc& a2);

/// theta parameters of the j-th basis section for degree difference k and translation (delta, beta).
ThetaParams basis_theta(int k, int j, const Rational& delta, double beta);

CMatrix section_eval(const SectionElement& s, const TorusModulus& tau, cplx z, double tol = kDefaultTol);
/// D^order S(z) with D = -(1 / 2 pi i) d/dz.
CMatrix section_deriv_eval(const SectionElement& s, const TorusModulus& tau, cplx z, int order,
                           double tol = kDefaultTol);

/// Factor relating S(z + tau) to S(z): S(z + tau) = c(z) exp(N2) S(z) exp(-N1); returns c(z).
cplx automorphy_scalar(const SectionElement& s, const TorusModulus& tau, cplx z);

/// Least-squares expansion of sampled Hom(V1, V3)-valued sections in hom_basis(A1, A3).
///
/// Samples follow a Halton sequence over the centred fundamental domain u + v tau,
/// u, v in [-1/2, 1/2), skipping a 1e-3 neighbourhood of the theta zeros at the corners.
/// Each sample's rows are scaled by 1 / max |basis value| there, which removes the Gaussian
/// growth of degree-K sections across the domain. The factorisation is computed once and reused.
class SectionExpander {
 public:
  SectionExpander(const BundleDesc& a1, const BundleDesc& a3, const TorusModulus& tau,
                  double tol = kDefaultTol);

  const std::vector<cplx>& samples() const { return samples_; }
  const std::vector<cplx>& held_out() const { return held_out_; }
  double condition() const { return condition_; }
  const HomBasis& basis() const { return basis_; }

  /// values[i] is the section at samples()[i], then held_out()[i - samples().size()].
  /// Throws NOT_CONVERGED when a held-out residual exceeds tol times the larger of the value
  /// and the sum of |coefficient| * |basis value| there.
  SectionElement expand(const std::vector<CMatrix>& values) const;

 private:
  struct Factor;
  BundleDesc a1_, a3_;
  TorusModulus tau_;
  double tol_;
  HomBasis basis_;
  std::vector<cplx> samples_, held_out_;
  std::vector<double> weights_;
  std::vector<std::vector<CMatrix>> held_out_basis_;
  std::shared_ptr<const Factor> factor_;
  double condition_ = 0.0;
};

/// Composition s2 o s1 (pointwise product S2(z) S1(z)) re-expanded in the target basis.
/// Degree-0 factors compose algebraically.
SectionElement compose(const SectionElement& s1, const SectionElement& s2, const TorusModulus& tau,
                       double tol = kDefaultTol);

/// Closed-form scalar composition via the theta addition formula.
SectionElement compose_closed_scalar(const SectionElement& s1, const SectionElement& s2,
                                     const TorusModulus& tau, double tol = kDefaultTol);

/// Hom(S1, S2) between torsion sheaves: {f : f N1 = N2 f} when the supports agree, else empty.
/// Composite A1 -> A2 -> S of a section s with a fiber map f in Hom(A2, S).
///
/// S = O (x) V' / (zeta - zeta0 - N'/2 pi i), so the map sees the jets of s at zeta0 = -a tau - b:
///   g = sum_p (-N')^p / p! F D^p s(zeta0).
/// Fiber maps of Hom(A, S) are written in the frame rotated by exp((a + alpha) N), alpha the
/// twist of A: F = f exp((a + alpha2) N2) and the result is g exp(-(a + alpha1) N1). This is the
/// frame in which the mirror map on Hom(A, S) is the closed form exp((n a - alpha) N') f exp(alpha N).
CMatrix compose_with_torsion(const SectionElement& s, const CMatrix& f, const TorsionDesc& t,
                             const TorusModulus& tau, double tol = kDefaultTol);

std::vector<CMatrix> hom_torsion(const TorsionDesc& s1, const TorsionDesc& s2);

struct BundleTorsionHom {
  int dim = 0;
  std::string tag;  // "fiber-hom" for A -> S, "zero" for S -> A
  std::vector<CMatrix> basis;
};

/// Hom(A, S) = Hom(V, V') (level-1 bundle fiber at the support).
BundleTorsionHom hom_bundle_torsion(const BundleDesc& a, const TorsionDesc& s);
/// Hom(S, A) vanishes in degree 0.
BundleTorsionHom hom_torsion_bundle(const TorsionDesc& s, const BundleDesc& a);

struct RiemannRoch {
  int h0 = 0;
  int h1 = 0;
  int degree = 0;
  int rank = 0;
  bool holds() const { return h0 - h1 == degree; }
};

RiemannRoch riemann_roch_check(const BundleDesc& a);

/// Pullback of a level-1 bundle along the c-fold cover E_{c tau'} -> E_{tau'}:
/// (n, a, b, N) -> (n c, a, c b, c N).
BundleDesc pullback_bundle(const BundleDesc& a, int c);
/// pi_{r*}: a level-s bundle on E_{r tau} becomes a level-(r s) bundle on E_tau.
BundleDesc pushforward_bundle(const BundleDesc& a, int r);

/// pi_* of a flat factor: the block map (v1, ..., vr) -> (v2, ..., vr, A v1).
CMatrix flat_pushforward(const CMatrix& a, int r);
/// pi^* of a flat factor: A^r.
CMatrix flat_pullback(const CMatrix& a, int r);

/// dim Hom(A1, A2[degree]) for bundles of any level, computed on the fiber product of the
/// two covers; degree 1 uses Serre duality.
int hom_dimension(const BundleDesc& a1, const BundleDesc& a2, int degree);
int hom_dimension(const TorsionDesc& s1, const TorsionDesc& s2, int degree);
int hom_dimension(const BundleDesc& a, const TorsionDesc& s, int degree);
int hom_dimension(const TorsionDesc& s, const BundleDesc& a, int degree);

}  // namespace hms
