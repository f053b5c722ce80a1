#include "hms/io.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "hms/error.hpp"

namespace hms::io {
namespace {

[[noreturn]] void schema(const std::string& message) { fail(errc::kSchema, message); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) schema(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) schema(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) schema(std::string(what) + " must be a number");
  return j.get<double>();
}

std::int64_t integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) schema(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

int small_int(const Json& j, const char* what) {
  const std::int64_t v = integer(j, what);
  if (v < -(1 << 30) || v > (1 << 30)) schema(std::string(what) + " is out of range");
  return static_cast<int>(v);
}

void expect(const Json& j, const char* side, const char* kind) {
  if (!j.is_object()) schema("document must be an object");
  if (j.contains("side") && j["side"] != side) schema(std::string("expected side ") + side);
  if (!j.contains("kind") || j["kind"] != kind) schema(std::string("expected kind '") + kind + "'");
}

int optional_int(const Json& j, const char* key, int fallback) {
  return j.contains(key) ? small_int(j[key], key) : fallback;
}

NilpotentMatrix nil_from(const Json& j) {
  if (!j.contains("nil")) return NilpotentMatrix::zero(1);
  return NilpotentMatrix::make(matrix_from(j["nil"]));
}

Point point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) schema("point must be [x, y]");
  return {rational_from(j[0]), rational_from(j[1])};
}

void write(std::ostream& os, const Json& j, int indent) {
  const auto pad = [&](int n) { os << '\n' << std::string(static_cast<std::size_t>(n), ' '); };
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string s(buf);
      // keep the float type visible so the document re-parses to the same value kind
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      os << s;
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        pad(indent + 2);
        os << Json(it.key()).dump() << ": ";
        write(os, it.value(), indent + 2);
      }
      pad(indent);
      os << '}';
      break;
    }
    case Json::value_t::array: {
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_object() && !(e.is_array() && !e.empty() && (e[0].is_array() || e[0].is_object()));
      if (j.empty()) {
        os << "[]";
      } else if (flat) {
        // short rows ([re, im], [num, den], matrix rows) stay on one line
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent);
        }
        os << ']';
      } else {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ',';
          pad(indent + 2);
          write(os, j[i], indent + 2);
        }
        pad(indent);
        os << ']';
      }
      break;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

// ---- scalars ---------------------------------------------------------------

Json to_json(const Rational& r) { return Json::array({r.num(), r.den()}); }

Json to_json(cplx v) { return Json::array({v.real(), v.imag()}); }

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const TorusModulus& t) { return Json::array({t.b_field(), t.area()}); }

Rational rational_from(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_array() || j.size() != 2) schema("rational must be [num, den]");
  const std::int64_t n = integer(j[0], "numerator"), d = integer(j[1], "denominator");
  if (d <= 0) schema("denominator must be positive");
  if (std::gcd(n < 0 ? -n : n, d) != 1) schema("rational must be in lowest terms");
  return Rational(n, d);
}

cplx complex_from(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) schema("complex number must be [re, im]");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

CMatrix matrix_from(const Json& j) {
  if (!j.is_array() || j.empty()) schema("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) schema("matrix rows must be non-empty arrays");
  CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) schema("matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from(j[r][c]);
  }
  return m;
}

TorusModulus modulus_from(const Json& j) {
  if (j.is_object()) return TorusModulus::make(number(field(j, "b_field"), "b_field"), number(field(j, "area"), "area"));
  const cplx t = complex_from(j);
  return TorusModulus::make(t.real(), t.imag());
}

// ---- objects ---------------------------------------------------------------

Json to_json(const Brane& b) {
  return Json{{"side", "A"},
              {"kind", "brane"},
              {"slope", Json::array({b.slope().p, b.slope().q})},
              {"intercept", to_json(b.intercept())},
              {"alpha", b.alpha()},
              {"phase_b", b.monodromy().phase_b},
              {"nil", to_json(b.monodromy().nil.matrix())}};
}

Brane brane_from(const Json& j) {
  expect(j, "A", "brane");
  const Json& s = field(j, "slope");
  if (!s.is_array() || s.size() != 2) schema("slope must be [p, q]");
  const Slope slope = Slope::make(integer(s[0], "slope p"), integer(s[1], "slope q"));
  const Monodromy m{j.contains("phase_b") ? number(j["phase_b"], "phase_b") : 0.0, nil_from(j)};
  const double alpha = j.contains("alpha") ? number(j["alpha"], "alpha") : Brane::principal_grading(slope);
  return Brane::make(slope, rational_from(field(j, "intercept")), alpha, m);
}

Json to_json(const BraneTuple& t) {
  Json comps = Json::array();
  for (const auto& b : t.components) comps.push_back(to_json(b));
  return Json{{"side", "A"}, {"kind", "tuple"}, {"components", comps}};
}

BraneTuple tuple_from(const Json& j) {
  expect(j, "A", "tuple");
  const Json& c = field(j, "components");
  if (!c.is_array()) schema("components must be an array");
  BraneTuple out;
  for (const auto& b : c) out.components.push_back(brane_from(b));
  return out;
}

Json to_json(const BundleDesc& a) {
  return Json{{"side", "B"},
              {"kind", "bundle"},
              {"degree", a.degree},
              {"twist_a", to_json(a.twist_a)},
              {"twist_b", a.twist_b},
              {"nil", to_json(a.nil.matrix())},
              {"level", a.level},
              {"shift", a.shift}};
}

BundleDesc bundle_from(const Json& j) {
  expect(j, "B", "bundle");
  return BundleDesc::make(small_int(field(j, "degree"), "degree"),
                          j.contains("twist_a") ? rational_from(j["twist_a"]) : Rational(0),
                          j.contains("twist_b") ? number(j["twist_b"], "twist_b") : 0.0, nil_from(j),
                          optional_int(j, "level", 1), optional_int(j, "shift", 0));
}

Json to_json(const TorsionDesc& s) {
  return Json{{"side", "B"},
              {"kind", "torsion"},
              {"point_a", to_json(s.point_a)},
              {"point_b", s.point_b},
              {"nil", to_json(s.nil.matrix())},
              {"shift", s.shift}};
}

TorsionDesc torsion_from(const Json& j) {
  expect(j, "B", "torsion");
  return TorsionDesc::make(rational_from(field(j, "point_a")),
                           j.contains("point_b") ? number(j["point_b"], "point_b") : 0.0, nil_from(j),
                           optional_int(j, "shift", 0));
}

ObjectDoc object_from(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) schema("object document needs a 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "brane") return brane_from(j);
  if (kind == "tuple") return tuple_from(j);
  if (kind == "bundle") return bundle_from(j);
  if (kind == "torsion") return torsion_from(j);
  schema("unknown object kind '" + kind + "'");
}

Json to_json(const ObjectDoc& o) {
  return std::visit([](const auto& v) { return to_json(v); }, o);
}

// ---- morphisms -------------------------------------------------------------

Json to_json(const ThetaParams& p) {
  return Json{{"characteristic", to_json(p.characteristic)},
              {"translation", Json{{"delta", to_json(p.translation.delta)}, {"beta", p.translation.beta}}},
              {"level", p.level},
              {"frequency", p.frequency}};
}

ThetaParams theta_params_from(const Json& j) {
  Translation t;
  if (j.contains("translation")) {
    const Json& tr = j["translation"];
    t.delta = rational_from(field(tr, "delta"));
    t.beta = number(field(tr, "beta"), "beta");
  }
  return ThetaParams::make(rational_from(field(j, "characteristic")), t, optional_int(j, "level", 1),
                           optional_int(j, "frequency", 1));
}

Json to_json(const PointSum& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms)
    terms.push_back(Json{{"point", Json::array({to_json(t.point.x), to_json(t.point.y)})}, {"coeff", to_json(t.coeff)}});
  return Json{{"side", "A"},
              {"kind", "point_sum"},
              {"source", to_json(p.source)},
              {"target", to_json(p.target)},
              {"degree", p.degree},
              {"terms", terms}};
}

PointSum point_sum_from(const Json& j) {
  expect(j, "A", "point_sum");
  std::vector<PointTerm> terms;
  const Json& ts = field(j, "terms");
  if (!ts.is_array()) schema("terms must be an array");
  for (const auto& t : ts) terms.push_back({point_from(field(t, "point")), matrix_from(field(t, "coeff"))});
  PointSum p = PointSum::make(brane_from(field(j, "source")), brane_from(field(j, "target")), std::move(terms));
  if (j.contains("degree") && small_int(j["degree"], "degree") != p.degree) schema("degree does not match the gradings");
  return p;
}

Json to_json(const Intertwiner& f) {
  return Json{{"side", "A"},
              {"kind", "intertwiner"},
              {"source", to_json(f.source)},
              {"target", to_json(f.target)},
              {"map", to_json(f.map)}};
}

Intertwiner intertwiner_from(const Json& j) {
  expect(j, "A", "intertwiner");
  Intertwiner f{brane_from(field(j, "source")), brane_from(field(j, "target")), matrix_from(field(j, "map"))};
  require(f.source.same_geodesic(f.target), errc::kInvalidArgument, "intertwiners live on one geodesic");
  require(f.map.rows() == f.target.rank() && f.map.cols() == f.source.rank(), errc::kInvalidArgument,
          "map must be target rank x source rank");
  const CMatrix lhs = f.map * f.source.monodromy().matrix();
  const CMatrix rhs = f.target.monodromy().matrix() * f.map;
  require((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, f.map.cwiseAbs().maxCoeff()),
          errc::kInvalidArgument, "map does not intertwine the monodromies");
  return f;
}

Json to_json(const SectionElement& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms)
    terms.push_back(Json{{"theta", t.theta ? to_json(*t.theta) : Json(nullptr)}, {"coeff", to_json(t.coeff)}});
  return Json{{"side", "B"},
              {"kind", "section"},
              {"source", to_json(s.source)},
              {"target", to_json(s.target)},
              {"k", s.k},
              {"delta", to_json(s.delta)},
              {"beta", s.beta},
              {"terms", terms}};
}

SectionElement section_from(const Json& j) {
  expect(j, "B", "section");
  SectionElement s;
  s.source = bundle_from(field(j, "source"));
  s.target = bundle_from(field(j, "target"));
  require(s.source.level == 1 && s.target.level == 1, errc::kLevelMismatch, "sections are stored between level-1 bundles");
  s.k = s.target.degree - s.source.degree;
  if (j.contains("k") && small_int(j["k"], "k") != s.k) schema("k must equal the degree difference");
  require(s.k >= 0, errc::kDegreeMismatch, "no sections into a bundle of lower degree");
  if (s.k > 0) {
    s.delta = (s.target.twist_a - s.source.twist_a) / Rational(s.k);
    s.beta = (s.target.twist_b - s.source.twist_b) / s.k;
  }
  if (j.contains("delta") && rational_from(j["delta"]) != s.delta) schema("delta does not match the twists");
  if (j.contains("beta") && number(j["beta"], "beta") != s.beta) schema("beta does not match the twists");
  const Json& ts = field(j, "terms");
  if (!ts.is_array()) schema("terms must be an array");
  for (const auto& t : ts) {
    SectionTerm term;
    const Json& th = field(t, "theta");
    if (!th.is_null()) term.theta = theta_params_from(th);
    term.coeff = matrix_from(field(t, "coeff"));
    require(term.coeff.rows() == s.target.fiber_dim() && term.coeff.cols() == s.source.fiber_dim(),
            errc::kInvalidArgument, "coefficient must be target fiber x source fiber");
    require(term.theta.has_value() == (s.k > 0), errc::kInvalidArgument,
            "positive-degree terms carry a theta function, degree-0 terms do not");
    s.terms.push_back(std::move(term));
  }
  return s;
}

Json to_json(const FiberMap& f) {
  return Json{{"side", "B"},
              {"kind", "fiber_map"},
              {"source", std::visit([](const auto& v) { return to_json(v); }, f.source)},
              {"target", to_json(f.target)},
              {"map", to_json(f.map)}};
}

FiberMap fiber_map_from(const Json& j) {
  expect(j, "B", "fiber_map");
  const Json& src = field(j, "source");
  FiberMap f{BundleDesc{}, torsion_from(field(j, "target")), matrix_from(field(j, "map"))};
  int cols = 0;
  if (src.contains("kind") && src["kind"] == "torsion") {
    const TorsionDesc s = torsion_from(src);
    cols = s.fiber_dim();
    f.source = s;
  } else {
    const BundleDesc a = bundle_from(src);
    cols = a.fiber_dim();
    f.source = a;
  }
  require(f.map.rows() == f.target.fiber_dim() && f.map.cols() == cols, errc::kInvalidArgument,
          "map must be target fiber x source fiber");
  return f;
}

MorphismDoc morphism_from(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) schema("morphism document needs a 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "point_sum") return point_sum_from(j);
  if (kind == "intertwiner") return intertwiner_from(j);
  if (kind == "section") return section_from(j);
  if (kind == "fiber_map") return fiber_map_from(j);
  schema("unknown morphism kind '" + kind + "'");
}

Json to_json(const MorphismDoc& m) {
  return std::visit([](const auto& v) { return to_json(v); }, m);
}

// ---- reports and text ------------------------------------------------------

Json to_json(const VerificationReport& r) {
  return Json{{"name", r.name},
              {"cases", r.cases},
              {"max_error", r.max_error},
              {"tolerance", r.tolerance},
              {"pass", r.pass}};
}

Json to_json(const std::vector<VerificationReport>& rs) {
  Json out = Json::array();
  for (const auto& r : rs) out.push_back(to_json(r));
  return out;
}

Json error_doc(const std::string& code, const std::string& message) {
  return Json{{"error", Json{{"code", code}, {"message", message}}}};
}

std::string dump(const Json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << '\n';
  return os.str();
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace hms::io
