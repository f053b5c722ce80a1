#pragma once

#include <string>

#include "hms/io.hpp"

// Document-level operations shared by the command line and the Python module.
namespace hms::io {

/// Composes `second` after `first` on side "a" (point sums, intertwiners) or "b"
/// (sections, fiber maps). Endpoints must agree exactly.
Json compose_docs(const std::string& side, const Json& first, const Json& second, const TorusModulus& tau,
                  double tol = kDefaultTol);

/// Image under the mirror functor of a B-side object or morphism document.
Json mirror_doc(const Json& doc, const TorusModulus& tau);

/// {"degree", "dimension"} plus "basis" where an explicit basis exists
/// (ext index 0 between level-1 bundles and torsion sheaves).
Json hom_doc(const Json& source, const Json& target, int degree);

}  // namespace hms::io
