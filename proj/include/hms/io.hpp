#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hms/mirror.hpp"

// JSON documents for objects, morphisms and reports.
//
// Rationals are [num, den], complex numbers [re, im], matrices rows of [re, im].
// Every loader re-validates through the library constructors, so a parsed document
// satisfies the same invariants as a value built in code.
namespace hms::io {

using Json = nlohmann::ordered_json;

Json to_json(const Rational& r);
Json to_json(cplx v);
Json to_json(const CMatrix& m);
Json to_json(const TorusModulus& t);
Json to_json(const Brane& b);
Json to_json(const BraneTuple& t);
Json to_json(const BundleDesc& a);
Json to_json(const TorsionDesc& s);
Json to_json(const ThetaParams& p);
Json to_json(const PointSum& p);
Json to_json(const Intertwiner& f);
Json to_json(const SectionElement& s);
Json to_json(const VerificationReport& r);
Json to_json(const std::vector<VerificationReport>& rs);

Rational rational_from(const Json& j);
cplx complex_from(const Json& j);
CMatrix matrix_from(const Json& j);
/// Accepts [re, im] or {"b_field": x, "area": y}.
TorusModulus modulus_from(const Json& j);
Brane brane_from(const Json& j);
BraneTuple tuple_from(const Json& j);
BundleDesc bundle_from(const Json& j);
TorsionDesc torsion_from(const Json& j);
ThetaParams theta_params_from(const Json& j);
PointSum point_sum_from(const Json& j);
Intertwiner intertwiner_from(const Json& j);
SectionElement section_from(const Json& j);

using ObjectDoc = std::variant<Brane, BraneTuple, BundleDesc, TorsionDesc>;
ObjectDoc object_from(const Json& j);
Json to_json(const ObjectDoc& o);

/// Fiber map out of a bundle or torsion sheaf into a torsion sheaf.
struct FiberMap {
  std::variant<BundleDesc, TorsionDesc> source;
  TorsionDesc target;
  CMatrix map;
};
Json to_json(const FiberMap& f);
FiberMap fiber_map_from(const Json& j);

using MorphismDoc = std::variant<PointSum, Intertwiner, SectionElement, FiberMap>;
MorphismDoc morphism_from(const Json& j);
Json to_json(const MorphismDoc& m);

Json error_doc(const std::string& code, const std::string& message);

/// Pretty text with doubles at 17 significant digits. Non-finite doubles become null.
std::string dump(const Json& j);
Json parse(const std::string& text);

}  // namespace hms::io
