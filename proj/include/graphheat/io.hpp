#ifndef GRAPHHEAT_IO_HPP
#define GRAPHHEAT_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphheat/completeness.hpp"
#include "graphheat/graph.hpp"
#include "graphheat/heat_kernel.hpp"
#include "graphheat/model_tree.hpp"
#include "graphheat/montecarlo.hpp"
#include "graphheat/spectrum.hpp"

namespace graphheat {

using json = nlohmann::json;

/// Malformed input file; byte() is the offset reported by the parser.
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t byte) : Error(what), byte_(byte) {}
  std::size_t byte() const noexcept { return byte_; }

 private:
  std::size_t byte_;
};

/// 17 significant digits, enough to reproduce every double exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json parse_json(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

namespace detail {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + ": missing field '" + key + "'", 0);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + ": field '" + key + "': " + e.what(), 0);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Branching rules and graphs.

inline json to_json(const ModelTreeSpec& s) {
  using K = ModelTreeSpec::Kind;
  switch (s.kind) {
    case K::list:
      return {{"kind", "list"}, {"params", {{"values", s.values}}}};
    case K::constant:
      return {{"kind", "constant"}, {"params", {{"k", s.k}}}};
    case K::geometric:
      return {{"kind", "geometric"}, {"params", {{"base", s.base}, {"coeff", s.coeff}}}};
    case K::polynomial:
      return {{"kind", "polynomial"}, {"params", {{"degree", s.degree}, {"coeff", s.coeff}}}};
    case K::callback:
      break;
  }
  throw PreconditionError("callback rules cannot be serialized");
}

/// Accepts {"kind": ..., "params": {...}}; params may also be a bare number
/// (constant k, geometric base, polynomial degree) or an array (list).
inline ModelTreeSpec spec_from_json(const json& j) {
  const std::string where = "branching";
  const auto kind = detail::field<std::string>(j, "kind", where);
  const json params = j.value("params", json::object());
  auto num = [&](const char* key, std::uint64_t fallback) {
    if (params.is_number_unsigned()) return params.get<std::uint64_t>();
    if (params.is_object() && params.contains(key)) return detail::field<std::uint64_t>(params, key, where);
    return fallback;
  };
  try {
    if (kind == "list") {
      if (params.is_array()) return ModelTreeSpec::list(params.get<std::vector<std::uint64_t>>());
      return ModelTreeSpec::list(detail::field<std::vector<std::uint64_t>>(params, "values", where));
    }
    if (kind == "constant") return ModelTreeSpec::constant(num("k", 0));
    if (kind == "geometric") {
      const auto base = num("base", 0);
      const std::uint64_t coeff = params.is_object() ? params.value("coeff", std::uint64_t{0}) : 0;
      return ModelTreeSpec::geometric(base, coeff);
    }
    if (kind == "polynomial") {
      const std::uint64_t coeff = params.is_object() ? params.value("coeff", std::uint64_t{1}) : 1;
      return ModelTreeSpec::polynomial(num("degree", 1), coeff);
    }
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what(), 0);
  }
  throw InputError(where + ": unknown kind '" + kind + "'", 0);
}

/// {"vertices", "edges", "root"} plus optional "horizon" and "model" for
/// generated graphs and "complement" (H^C ids) for attached graphs.
inline json graph_to_json(const RootedGraph& g) {
  const auto& graph = g.graph();
  json j;
  j["vertices"] = std::vector<VertexId>(graph.vertices().begin(), graph.vertices().end());
  json edges = json::array();
  for (const auto& [u, v] : graph.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  j["root"] = g.root();
  if (g.has_declared_horizon()) j["horizon"] = g.horizon();
  if (g.model() && g.model()->kind != ModelTreeSpec::Kind::callback) j["model"] = to_json(*g.model());
  if (g.has_partition()) {
    std::vector<VertexId> hc;
    for (std::size_t i = 0; i < graph.size(); ++i)
      if (g.side_at(i) == Side::complement) hc.push_back(graph.id(i));
    j["complement"] = hc;
  }
  return j;
}

/// Reads either a graph document or a model-tree document
/// {"branching": {...}, "depth": d}.
inline RootedGraph graph_from_json(const json& j, double vertex_cap = kDefaultVertexCap) {
  if (!j.is_object()) throw InputError("graph: expected a JSON object", 0);
  if (j.contains("branching")) {
    const auto spec = spec_from_json(j.at("branching"));
    return build_model_tree(spec, detail::field<int>(j, "depth", "model tree"), vertex_cap);
  }
  const std::string where = "graph";
  auto vertices = detail::field<std::vector<VertexId>>(j, "vertices", where);
  if (static_cast<double>(vertices.size()) > vertex_cap) throw CapError(static_cast<double>(vertices.size()), vertex_cap);
  std::vector<Edge> edges;
  for (const auto& e : detail::field<json>(j, "edges", where)) {
    if (!e.is_array() || e.size() != 2) throw InputError(where + ": every edge must be a pair", 0);
    edges.emplace_back(e[0].get<VertexId>(), e[1].get<VertexId>());
  }
  const auto root = detail::field<VertexId>(j, "root", where);
  std::optional<int> horizon;
  if (j.contains("horizon")) horizon = detail::field<int>(j, "horizon", where);
  auto graph = std::make_shared<const Graph>(Graph::from_edges(std::move(vertices), edges));
  if (!graph->contains(root)) throw InputError(where + ": root " + std::to_string(root) + " is not a vertex", 0);
  RootedGraph g(std::move(graph), root, horizon);
  if (j.contains("model")) g.set_model(spec_from_json(j.at("model")));
  if (j.contains("complement")) {
    std::vector<std::uint8_t> sides(g.graph().size(), static_cast<std::uint8_t>(Side::h));
    for (auto v : detail::field<std::vector<VertexId>>(j, "complement", where)) {
      if (!g.graph().contains(v)) throw InputError(where + ": complement vertex " + std::to_string(v) + " unknown", 0);
      sides[g.graph().index_of(v)] = static_cast<std::uint8_t>(Side::complement);
    }
    g.set_sides(std::move(sides));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Reports.

inline json to_json(const CriterionReport& r) {
  json j{{"kind", to_string(r.kind)},
         {"partial_sums", r.partial_sums},
         {"first_index", r.first_index},
         {"verdict", to_string(r.verdict)},
         {"horizon", r.horizon},
         {"evidence", r.evidence}};
  j["tail_rule"] = r.tail_rule.empty() ? json(nullptr) : json(r.tail_rule);
  j["limit"] = r.limit ? json(*r.limit) : json(nullptr);
  return j;
}

inline json to_json(const Certificate& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["criteria"] = json::array();
  for (const auto& r : c.criteria) j["criteria"].push_back(to_json(r));
  j["witnesses"] = json::array();
  for (const auto& w : c.witnesses)
    j["witnesses"].push_back({{"lambda", w.lambda},
                              {"sup", w.sup},
                              {"residual_max", w.residual_max},
                              {"bound", w.bound},
                              {"bounded_certified", w.bounded_certified},
                              {"refused", w.refused},
                              {"note", w.note}});
  j["mass_evidence"] = json::array();
  for (const auto& m : c.mass_evidence)
    j["mass_evidence"].push_back(
        {{"t", m.t}, {"radius", m.radius}, {"mass", m.mass}, {"gap", std::isnan(m.gap) ? json(nullptr) : json(m.gap)}});
  j["harmonic_evidence"] = json::array();
  for (const auto& h : c.harmonic_evidence)
    j["harmonic_evidence"].push_back(
        {{"lambda", h.lambda}, {"radii", h.radii}, {"root_values", h.root_values}, {"stabilized", h.stabilized}});
  j["conditions_exhibited"] = c.conditions_exhibited;
  j["numeric_incompleteness"] = c.numeric_incompleteness;
  j["numeric_completeness"] = c.numeric_completeness;
  j["consistent"] = c.consistent;
  j["notes"] = c.notes;
  return j;
}

inline json to_json(const EssSpectrumCertificate& e) {
  return {{"kind", "essential-spectrum"},
          {"c", e.c},
          {"c_positive", e.c_positive},
          {"outer_min_valence", e.outer_min_valence},
          {"lower_bounds", e.lower_bounds},
          {"verdict", e.empty_certified ? "empty-certified" : "inconclusive"},
          {"growth_rule", e.growth_rule},
          {"reason", e.reason}};
}

inline json to_json(const SpectralBounds& b, const std::optional<EssSpectrumCertificate>& ess = std::nullopt) {
  json j;
  j["c"] = b.curvature.c;
  j["m"] = b.curvature.min_valence;
  j["curvature_argmin"] = b.curvature.argmin;
  j["bound_bounded"] = b.bound_bounded;
  j["bound_physical"] = b.bound_physical;
  j["alpha_upper"] = b.cheeger ? json(b.cheeger->alpha) : json(nullptr);
  if (b.cheeger) {
    j["alpha_scope"] = b.cheeger->scope;
    j["alpha_argmin"] = b.cheeger->argmin;
    j["sets_enumerated"] = b.cheeger->sets_enumerated;
  }
  j["lambda0_by_radius"] = json::array();
  for (std::size_t i = 0; i < b.radii.size(); ++i)
    j["lambda0_by_radius"].push_back(
        {{"r", b.radii[i]}, {"value", b.lambda0_physical[i]}, {"bounded", b.lambda0_bounded[i]}});
  j["respected"] = b.respected;
  j["certificates"] = json::array();
  j["certificates"].push_back({{"kind", "curvature-lower-bound"},
                               {"bounded", b.bound_bounded},
                               {"physical", b.bound_physical},
                               {"respected", b.respected}});
  if (ess) j["certificates"].push_back(to_json(*ess));
  return j;
}

inline json to_json(const SurvivalEstimate& s) {
  return {{"p_hat", s.p_hat},
          {"stderr", s.stderr_},
          {"N", s.trials},
          {"survivors", s.survivors},
          {"censored_fraction", s.censored_fraction()}};
}

inline json to_json(const ExhaustionResult& r) {
  json j;
  j["source"] = r.source;
  j["times"] = r.times;
  j["radii"] = r.radii;
  j["masses"] = r.masses;
  j["gaps"] = r.gaps;
  j["window_radius"] = r.window_radius;
  j["error_bar"] = r.error_bar;
  j["converged"] = r.converged;
  j["horizon_exhausted"] = r.horizon_exhausted;
  j["worst_monotonicity"] = r.worst_monotonicity;
  return j;
}

}  // namespace graphheat

#endif  // GRAPHHEAT_IO_HPP
