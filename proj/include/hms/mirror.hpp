#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "hms/fukaya.hpp"
#include "hms/sheaves.hpp"

namespace hms {

// ---- objects -------------------------------------------------------------

/// Bundle of degree n at level r -> geodesic of slope n/r through (0, -a), grading
/// arctan(n/r)/pi + shift, monodromy (b, N). When g = gcd(n, r) > 1 the image circle is
/// covered g times and the pushed-forward local system splits into g branes with
/// monodromy (b + j)/g, N/g.
BraneTuple phi_object_tuple(const BundleDesc& a);
/// Single-brane image; rejects bundles whose image splits.
Brane phi_object(const BundleDesc& a);
/// Torsion sheaf at -a tau - b -> vertical brane with x-intercept a, grading 1/2 + shift.
Brane phi_object(const TorsionDesc& s);

/// Invariant-carrying pair (B-side object, its mirror, modulus).
struct MirrorPair {
  std::variant<BundleDesc, TorsionDesc> bside;
  BraneTuple aside;
  TorusModulus tau = TorusModulus::make(0.0, 1.0);

  static MirrorPair make(std::variant<BundleDesc, TorsionDesc> b, const TorusModulus& tau);
};

// ---- morphisms -----------------------------------------------------------

/// Image of a positive-degree section of level-1 bundles. The basis term theta_j (x) f maps to
///   exp(-pi i tau k delta^2) exp(-2 pi i k delta beta) exp(delta N2) f exp(-delta N1)
/// at the intersection point with x = delta + j/k (mod 1).
PointSum phi_morphism(const SectionElement& s, const TorusModulus& tau);
/// Degree-0 homs (equal twists) map to intertwiners with the same matrix.
Intertwiner phi_intertwiner(const SectionElement& s);
FukayaBlock phi_block(const SectionElement& s, const TorusModulus& tau);

/// Hom(A, S) -> Hom(Phi A, Phi S). With A twisted by alpha tau + beta (degree n) and S at
/// -a tau - b: scalar exp(-pi i tau (n a^2 - 2 a alpha) + 2 pi i (a beta + b alpha - n a b)),
/// matrix exp((n a - alpha) N') f exp(alpha N), at the point (a, n a - alpha).
PointSum phi_bundle_torsion_morphism(const CMatrix& f, const BundleDesc& a, const TorsionDesc& s,
                                     const TorusModulus& tau);
/// Torsion morphisms are intertwiners on both sides; the map is the identity on f.
Intertwiner phi_torsion_morphism(const CMatrix& f, const TorsionDesc& s1, const TorsionDesc& s2);

// ---- isogenies on the symplectic side -------------------------------------

/// p_r(x, y) = (r x, y) from E^{r tau} to E^{tau}.
BraneTuple pushforward_brane(const Brane& o, int r);
BraneTuple pushforward_brane(const BraneTuple& o, int r);
/// Preimage components, each carrying M^{r/g} where g = gcd(r, q) counts the components.
BraneTuple pullback_brane(const Brane& o, int r);
BraneTuple pullback_brane(const BraneTuple& o, int r);

// ---- verification -------------------------------------------------------

struct VerificationReport {
  std::string name;
  int cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Threshold for checks that must hold exactly (integer dimensions, matrix equality).
inline constexpr double kExactTolerance = 2.2250738585072014e-308;

struct VerifyOptions {
  TorusModulus tau = TorusModulus::make(0.0, 1.0);
  std::uint64_t seed = 1;
  std::optional<double> tol;  // overrides every suite's default threshold
};

/// Max over pairs of basis morphisms of |Phi(s2 o s1) - m2(Phi s1, Phi s2)|, divided by
/// max(1, largest m2 coefficient): absolute for unit-size images, relative for large ones.
double functoriality_residual(const BundleDesc& a1, const BundleDesc& a2, const BundleDesc& a3,
                              const TorusModulus& tau, int* cases = nullptr);

std::vector<std::string> suite_names();
/// Runs one suite ("theta", "simple-example", "functoriality", "serre", "isogeny", "torsion",
/// "automorphy") or "all".
std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyOptions& opts);

}  // namespace hms
