#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "hms/numerics.hpp"
#include "hms/rational.hpp"

namespace hms {

/// Reduced slope p/q with q >= 0; the vertical direction is (1, 0).
struct Slope {
  std::int64_t p = 0;
  std::int64_t q = 1;

  static Slope make(std::int64_t p, std::int64_t q);
  static Slope integer(std::int64_t n) { return {n, 1}; }
  static Slope vertical() { return {1, 0}; }

  bool is_vertical() const { return q == 0; }
  bool is_horizontal() const { return p == 0; }
  /// Primitive direction vector (q, p), oriented with non-negative x-component.
  std::pair<std::int64_t, std::int64_t> direction() const { return {q, p}; }

  friend bool operator==(const Slope&, const Slope&) = default;
};

/// A point of the torus R^2 / Z^2, both coordinates in [0, 1).
struct Point {
  Rational x;
  Rational y;

  static Point reduced(const Rational& x, const Rational& y) { return {x.frac(), y.frac()}; }
  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

/// Flat local system M = exp(-2 pi i phase_b) exp(nil); unit-modulus spectrum by construction.
struct Monodromy {
  double phase_b = 0.0;
  NilpotentMatrix nil = NilpotentMatrix::zero(1);

  static Monodromy trivial(int rank = 1) { return {0.0, NilpotentMatrix::zero(rank)}; }

  int rank() const { return nil.dim(); }
  CMatrix matrix() const;
  /// Parallel transport over a signed fraction l of the geodesic: M^l.
  CMatrix transport(double l) const;

  friend bool operator==(const Monodromy&, const Monodromy&) = default;
};

enum class InterceptAxis { X, Y };

/// Graded closed geodesic with a flat local system.
///
/// The geodesic is stored canonically: non-horizontal lines keep their
/// x-intercept in [0, 1/|p|) (every lattice translate meets y = 0 on that
/// coset), horizontal lines keep their y-intercept in [0, 1).
class Brane {
 public:
  static Brane make(Slope slope, Rational intercept, double alpha, Monodromy monodromy);
  /// Geodesic through an arbitrary base point.
  static Brane through(Slope slope, Point base, double alpha, Monodromy monodromy);
  /// Grading in (-1/2, 1/2] whose phase is the slope direction.
  static double principal_grading(Slope slope);

  const Slope& slope() const { return slope_; }
  const Rational& intercept() const { return intercept_; }
  InterceptAxis axis() const { return slope_.is_horizontal() ? InterceptAxis::Y : InterceptAxis::X; }
  double alpha() const { return alpha_; }
  const Monodromy& monodromy() const { return monodromy_; }
  int rank() const { return monodromy_.rank(); }
  Point base_point() const;

  bool same_geodesic(const Brane& other) const {
    return slope_ == other.slope_ && intercept_ == other.intercept_;
  }

  friend bool operator==(const Brane&, const Brane&) = default;

 private:
  Brane(Slope s, Rational i, double a, Monodromy m)
      : slope_(s), intercept_(i), alpha_(a), monodromy_(std::move(m)) {}
  Slope slope_;
  Rational intercept_;
  double alpha_ = 0.0;
  Monodromy monodromy_;
};

/// Formal biproduct: an ordered tuple of branes. The empty tuple is the zero object.
struct BraneTuple {
  std::vector<Brane> components;

  friend bool operator==(const BraneTuple&, const BraneTuple&) = default;
};

struct PointTerm {
  Point point;
  CMatrix coeff;  // target fiber x source fiber
};

/// Morphism between transversal branes: a formal sum of intersection points
/// with fiber-hom coefficients.
struct PointSum {
  Brane source;
  Brane target;
  int degree = 0;
  std::vector<PointTerm> terms;

  /// Validates points and coefficient shapes; merges repeated points.
  static PointSum make(Brane source, Brane target, std::vector<PointTerm> terms);
  /// Every intersection point with a zero coefficient.
  static PointSum zero(Brane source, Brane target);

  CMatrix coeff_at(const Point& p) const;
  PointSum scaled(cplx s) const;
  PointSum operator+(const PointSum& other) const;
};

/// Morphism between local systems on one geodesic: f with f M1 = M2 f.
struct Intertwiner {
  Brane source;
  Brane target;
  CMatrix map;
};

/// ceil(alpha1 - alpha2).
int maslov(const Brane& l1, const Brane& l2);

/// (L, alpha, M)[n] = (L, alpha + n, M).
Brane shift(const Brane& o, int n);

/// Intersection points of two geodesics. Integer-slope pairs are ordered by the
/// index k of x_k = (n1 x1 - n2 x2 + k) / (n1 - n2); other pairs by the step
/// along the first geodesic. Throws NON_TRANSVERSAL for identical geodesics;
/// parallel distinct geodesics give an empty list.
std::vector<Point> intersections(const Brane& l1, const Brane& l2);

/// dim Hom(O1, O2[degree]) in the degree-0 truncated category.
int hom_dim(const Brane& o1, const Brane& o2, int degree);
int hom_dim(const BraneTuple& o1, const BraneTuple& o2, int degree);

/// Basis of Hom(M1, M2) for two local systems on the same geodesic.
std::vector<CMatrix> intertwiner_hom(const Brane& o1, const Brane& o2);

struct M2Diagnostics {
  int window = 0;           // enumerated lattice indices on each side of the centre
  double annulus_norm = 0;  // contribution of the outer half of the window
};

/// Composition m2(u1, u2): Hom(L0, L1) x Hom(L1, L2) -> Hom(L0, L2) for three
/// pairwise distinct geodesics.
///
/// A lift of each input point p0 is fixed; the lifts of L2 are the lines
/// det(X - B2, d2) = m, m in Z, each cutting the lifts of L0 and L1 through p0
/// in a triangle p0, p1, p2. A triangle counts when p1 projects to the point of
/// the second input and the cycle p0 -> p1 -> p2 is clockwise (degenerate
/// triangles count once). Its contribution is
///   exp(2 pi i tau Area) * P2(l2) t2 P1(l1) t1 P0(l0)
/// with l_i the signed fraction of L_i traversed (p2->p0 on L0, p0->p1 on L1,
/// p1->p2 on L2). The window is doubled and the outer half must contribute < tol.
PointSum m2(const PointSum& u1, const PointSum& u2, const TorusModulus& tau,
            double tol = kDefaultTol, M2Diagnostics* diagnostics = nullptr);

// Compositions involving same-geodesic morphisms act on coefficients.
PointSum compose(const Intertwiner& first, const PointSum& second);
PointSum compose(const PointSum& first, const Intertwiner& second);
Intertwiner compose(const Intertwiner& first, const Intertwiner& second);

/// One block of a tuple morphism.
using FukayaBlock = std::variant<std::monostate, PointSum, Intertwiner>;

/// Matrix of blocks between two tuples; blocks(i, j) maps source j to target i.
struct TupleMorphism {
  BraneTuple source;
  BraneTuple target;
  std::vector<std::vector<FukayaBlock>> blocks;  // [target index][source index]

  static TupleMorphism zero(BraneTuple source, BraneTuple target);
};

/// Matrix product of tuple morphisms (second after first), using m2 and the
/// algebraic compositions on blocks.
TupleMorphism compose(const TupleMorphism& first, const TupleMorphism& second,
                      const TorusModulus& tau, double tol = kDefaultTol);

}  // namespace hms
