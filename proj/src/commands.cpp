#include "hms/commands.hpp"

#include <type_traits>
#include <variant>

#include "hms/error.hpp"

namespace hms::io {

namespace {

void check_side(const Json& doc, const std::string& side) {
  const std::string want = side == "a" ? "A" : "B";
  if (doc.contains("side") && doc["side"] != want)
    fail(errc::kInvalidArgument, "document is not on side " + want);
}

// ---- compose ---------------------------------------------------------------

void same_brane(const Brane& a, const Brane& b) {
  require(a == b, errc::kEndpointMismatch, "target of the first morphism is not the source of the second");
}

Json compose_a(const MorphismDoc& first, const MorphismDoc& second, const TorusModulus& t, double tol) {
  if (auto* f = std::get_if<PointSum>(&first)) {
    if (auto* g = std::get_if<PointSum>(&second)) {
      same_brane(f->target, g->source);
      return to_json(m2(*f, *g, t, tol));
    }
    if (auto* g = std::get_if<Intertwiner>(&second)) {
      same_brane(f->target, g->source);
      return to_json(compose(*f, *g));
    }
  } else if (auto* f = std::get_if<Intertwiner>(&first)) {
    if (auto* g = std::get_if<PointSum>(&second)) {
      same_brane(f->target, g->source);
      return to_json(compose(*f, *g));
    }
    if (auto* g = std::get_if<Intertwiner>(&second)) {
      same_brane(f->target, g->source);
      return to_json(compose(*f, *g));
    }
  }
  fail(errc::kInvalidArgument, "side a composes point_sum and intertwiner documents");
}

Json compose_b(const MorphismDoc& first, const MorphismDoc& second, const TorusModulus& t, double tol) {
  if (auto* f = std::get_if<SectionElement>(&first)) {
    if (auto* g = std::get_if<SectionElement>(&second)) {
      require(f->target == g->source, errc::kEndpointMismatch, "target of the first morphism is not the source of the second");
      return to_json(compose(*f, *g, t, tol));
    }
    if (auto* g = std::get_if<FiberMap>(&second)) {
      auto* src = std::get_if<BundleDesc>(&g->source);
      require(src && *src == f->target, errc::kEndpointMismatch, "target of the first morphism is not the source of the second");
      return to_json(FiberMap{f->source, g->target, compose_with_torsion(*f, g->map, g->target, t, tol)});
    }
  } else if (auto* f = std::get_if<FiberMap>(&first)) {
    if (auto* g = std::get_if<FiberMap>(&second)) {
      auto* mid = std::get_if<TorsionDesc>(&g->source);
      require(mid && *mid == f->target, errc::kEndpointMismatch, "target of the first morphism is not the source of the second");
      return to_json(FiberMap{f->source, g->target, g->map * f->map});
    }
  }
  fail(errc::kInvalidArgument, "side b composes section and fiber_map documents");
}

// ---- mirror ----------------------------------------------------------------

Json mirror_impl(const Json& doc, const TorusModulus& t) {
  check_side(doc, "b");
  const std::string kind = doc.value("kind", "");
  if (kind == "bundle") {
    const BraneTuple image = phi_object_tuple(bundle_from(doc));
    return image.components.size() == 1 ? to_json(image.components[0]) : to_json(image);
  }
  if (kind == "torsion") return to_json(phi_object(torsion_from(doc)));
  const MorphismDoc m = morphism_from(doc);
  if (auto* s = std::get_if<SectionElement>(&m)) {
    if (s->k == 0) return to_json(phi_intertwiner(*s));
    return to_json(phi_morphism(*s, t));
  }
  const auto& f = std::get<FiberMap>(m);
  if (auto* a = std::get_if<BundleDesc>(&f.source)) return to_json(phi_bundle_torsion_morphism(f.map, *a, f.target, t));
  return to_json(phi_torsion_morphism(f.map, std::get<TorsionDesc>(f.source), f.target));
}

// ---- hom -------------------------------------------------------------------

int shift_of(const ObjectDoc& o) {
  if (auto* a = std::get_if<BundleDesc>(&o)) return a->shift;
  if (auto* s = std::get_if<TorsionDesc>(&o)) return s->shift;
  return 0;
}

Json hom_impl(const Json& src, const Json& dst, int degree) {
  const ObjectDoc x = object_from(src), y = object_from(dst);
  const bool bx = std::holds_alternative<BundleDesc>(x) || std::holds_alternative<TorsionDesc>(x);
  const bool by = std::holds_alternative<BundleDesc>(y) || std::holds_alternative<TorsionDesc>(y);
  require(bx == by, errc::kInvalidArgument, "both objects must live on the same side");
  Json out{{"degree", degree}};
  if (!bx) {
    auto tuple = [](const ObjectDoc& o) {
      if (auto* b = std::get_if<Brane>(&o)) return BraneTuple{{*b}};
      return std::get<BraneTuple>(o);
    };
    out["dimension"] = hom_dim(tuple(x), tuple(y), degree);
    return out;
  }
  out["dimension"] = std::visit(
      [&](const auto& a, const auto& b) -> int {
        using A = std::decay_t<decltype(a)>;
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<A, Brane> || std::is_same_v<A, BraneTuple> || std::is_same_v<B, Brane> ||
                      std::is_same_v<B, BraneTuple>)
          return 0;
        else
          return hom_dimension(a, b, degree);
      },
      x, y);
  // Explicit bases exist for ext index 0 between level-1 bundles and torsion sheaves.
  if (degree + shift_of(y) - shift_of(x) != 0) return out;
  Json basis = Json::array();
  const auto* a1 = std::get_if<BundleDesc>(&x);
  const auto* a2 = std::get_if<BundleDesc>(&y);
  const auto* s1 = std::get_if<TorsionDesc>(&x);
  const auto* s2 = std::get_if<TorsionDesc>(&y);
  if (a1 && a2) {
    if (a1->level != 1 || a2->level != 1) return out;
    for (const auto& e : hom_basis(*a1, *a2).elements) basis.push_back(to_json(e));
  } else if (s1 && s2) {
    for (const auto& f : hom_torsion(*s1, *s2)) basis.push_back(to_json(FiberMap{*s1, *s2, f}));
  } else if (a1 && s2) {
    for (const auto& f : hom_bundle_torsion(*a1, *s2).basis) basis.push_back(to_json(FiberMap{*a1, *s2, f}));
  }
  out["basis"] = basis;
  return out;
}

}  // namespace

Json compose_docs(const std::string& side, const Json& first, const Json& second, const TorusModulus& tau,
                  double tol) {
  require(side == "a" || side == "b", errc::kInvalidArgument, "side must be a or b");
  check_side(first, side);
  check_side(second, side);
  const MorphismDoc m1 = morphism_from(first), m2doc = morphism_from(second);
  return side == "a" ? compose_a(m1, m2doc, tau, tol) : compose_b(m1, m2doc, tau, tol);
}

Json mirror_doc(const Json& doc, const TorusModulus& tau) { return mirror_impl(doc, tau); }

Json hom_doc(const Json& source, const Json& target, int degree) { return hom_impl(source, target, degree); }

}  // namespace hms::io
