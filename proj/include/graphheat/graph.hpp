#ifndef GRAPHHEAT_GRAPH_HPP
#define GRAPHHEAT_GRAPH_HPP

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphheat/error.hpp"
#include "graphheat/model_spec.hpp"

namespace graphheat {

using VertexId = std::uint64_t;
using Edge = std::pair<VertexId, VertexId>;

/// Default cap on the number of vertices of any materialized structure.
inline constexpr double kDefaultVertexCap = 2e7;

/// Unweighted simple graph with opaque 64-bit vertex ids.
///
/// Vertices are stored in ascending id order and addressed internally by
/// their position; neighbor lists hold positions and are therefore sorted by
/// id as well. The graph is immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Throws PreconditionError on loops, repeated edges or unknown endpoints.
  static Graph from_edges(std::vector<VertexId> vertices, std::span<const Edge> edges) {
    Graph g;
    std::sort(vertices.begin(), vertices.end());
    if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
      throw PreconditionError("duplicate vertex id");
    g.ids_ = std::move(vertices);
    g.index_.reserve(g.ids_.size());
    for (std::size_t i = 0; i < g.ids_.size(); ++i)
      g.index_.emplace(g.ids_[i], static_cast<std::uint32_t>(i));

    std::vector<std::uint32_t> degree(g.ids_.size(), 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> local;
    local.reserve(edges.size());
    for (const auto& [u, v] : edges) {
      if (u == v) throw PreconditionError("loop at vertex " + std::to_string(u));
      const auto a = g.lookup(u);
      const auto b = g.lookup(v);
      local.emplace_back(a, b);
      ++degree[a];
      ++degree[b];
    }
    g.offsets_.assign(g.ids_.size() + 1, 0);
    for (std::size_t i = 0; i < degree.size(); ++i)
      g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.adj_.resize(g.offsets_.back());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [a, b] : local) {
      g.adj_[fill[a]++] = b;
      g.adj_[fill[b]++] = a;
    }
    for (std::size_t i = 0; i < g.ids_.size(); ++i) {
      auto first = g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
      auto last = g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last)
        throw PreconditionError("multiple edges at vertex " + std::to_string(g.ids_[i]));
    }
    return g;
  }

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return adj_.size() / 2; }
  std::span<const VertexId> vertices() const noexcept { return ids_; }

  bool contains(VertexId v) const { return index_.count(v) != 0; }
  VertexId id(std::size_t i) const { return ids_[i]; }

  std::size_t index_of(VertexId v) const { return lookup(v); }

  std::span<const std::uint32_t> neighbor_indices(std::size_t i) const {
    return {adj_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  std::vector<VertexId> neighbors(VertexId v) const {
    std::vector<VertexId> out;
    for (auto j : neighbor_indices(lookup(v))) out.push_back(ids_[j]);
    return out;
  }

  std::size_t degree_at(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t degree(VertexId v) const { return degree_at(lookup(v)); }

  /// Undirected edges, each once with u < v, sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < ids_.size(); ++i)
      for (auto j : neighbor_indices(i))
        if (i < j) out.emplace_back(ids_[i], ids_[j]);
    return out;
  }

 private:
  std::uint32_t lookup(VertexId v) const {
    const auto it = index_.find(v);
    if (it == index_.end()) throw PreconditionError("unknown vertex " + std::to_string(v));
    return it->second;
  }

  std::vector<VertexId> ids_;
  std::unordered_map<VertexId, std::uint32_t> index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> adj_;
};

enum class GraphKind { explicit_finite, generated_infinite };

/// Which side of an attachment G = H u H^C a vertex belongs to.
enum class Side : std::uint8_t { h = 0, complement = 1 };

/// A graph with a distinguished root x0 and BFS distances r(x) = d(x, x0).
///
/// Generated graphs (truncations of infinite graphs) declare a horizon: the
/// largest radius whose spheres have their full neighborhoods materialized.
/// Any ball or sphere request beyond it raises HorizonError.
class RootedGraph {
 public:
  RootedGraph() = default;

  RootedGraph(std::shared_ptr<const Graph> graph, VertexId root,
              std::optional<int> horizon = std::nullopt)
      : graph_(std::move(graph)), root_(root), horizon_(horizon) {
    if (!graph_) throw PreconditionError("null graph");
    root_index_ = graph_->index_of(root);
    compute_distances();
  }

  const Graph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const Graph> graph_ptr() const noexcept { return graph_; }
  VertexId root() const noexcept { return root_; }
  GraphKind kind() const noexcept {
    return horizon_ ? GraphKind::generated_infinite : GraphKind::explicit_finite;
  }

  /// Largest radius with exact neighborhoods; for finite graphs the
  /// eccentricity of the root (every larger ball is the whole component).
  int horizon() const noexcept { return horizon_ ? *horizon_ : eccentricity(); }
  bool has_declared_horizon() const noexcept { return horizon_.has_value(); }
  int eccentricity() const noexcept { return static_cast<int>(spheres_.size()) - 1; }

  /// Distance from the root; -1 for vertices in other components.
  int distance(VertexId v) const { return dist_[graph_->index_of(v)]; }
  int distance_at(std::size_t i) const { return dist_[i]; }

  std::size_t degree(VertexId v) const { return graph_->degree(v); }
  VertexId neighbor(VertexId v, std::size_t k) const {
    return graph_->id(graph_->neighbor_indices(graph_->index_of(v))[k]);
  }

  /// Vertex positions on the sphere S_r, ascending by id; empty past the
  /// eccentricity.
  std::span<const std::uint32_t> sphere_indices(int r) const {
    if (r < 0 || r >= static_cast<int>(spheres_.size())) return {};
    return spheres_[static_cast<std::size_t>(r)];
  }

  void check_radius(int r) const {
    if (r < 0) throw PreconditionError("negative radius");
    if (horizon_ && r > *horizon_) throw HorizonError(r, *horizon_);
  }

  std::size_t out_degree(VertexId v) const { return radial_degrees_at(graph_->index_of(v)).first; }

  /// m_{+1}(x) and m_{-1}(x): neighbors one step further / closer to the root.
  std::pair<std::size_t, std::size_t> radial_degrees_at(std::size_t i) const {
    std::size_t out = 0, in = 0;
    const int d = dist_[i];
    for (auto j : graph_->neighbor_indices(i)) {
      if (dist_[j] == d + 1) ++out;
      else if (dist_[j] == d - 1) ++in;
    }
    return {out, in};
  }

  /// Same graph, new root. Keeps the horizon only when re-rooting at the
  /// original root; callers that re-root generated graphs must bound their
  /// radii by hand.
  RootedGraph rerooted(VertexId root, std::optional<int> horizon) const {
    RootedGraph out(graph_, root, horizon);
    out.model_ = model_;
    out.sides_ = sides_;
    return out;
  }

  /// Branching rule the graph was generated from, if any. For attached graphs
  /// it describes the H part only.
  const std::optional<ModelTreeSpec>& model() const noexcept { return model_; }
  void set_model(std::optional<ModelTreeSpec> model) { model_ = std::move(model); }

  bool has_partition() const noexcept { return !sides_.empty(); }
  Side side_at(std::size_t i) const {
    return sides_.empty() ? Side::h : static_cast<Side>(sides_[i]);
  }
  Side side(VertexId v) const { return side_at(graph_->index_of(v)); }
  void set_sides(std::vector<std::uint8_t> sides) {
    if (!sides.empty() && sides.size() != graph_->size())
      throw PreconditionError("partition size mismatch");
    sides_ = std::move(sides);
  }

 private:
  void compute_distances() {
    dist_.assign(graph_->size(), -1);
    spheres_.clear();
    dist_[root_index_] = 0;
    std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(root_index_)};
    while (!frontier.empty()) {
      std::sort(frontier.begin(), frontier.end());
      std::vector<std::uint32_t> next;
      const int d = static_cast<int>(spheres_.size());
      for (auto i : frontier)
        for (auto j : graph_->neighbor_indices(i))
          if (dist_[j] < 0) {
            dist_[j] = d + 1;
            next.push_back(j);
          }
      spheres_.push_back(std::move(frontier));
      frontier = std::move(next);
    }
  }

  std::shared_ptr<const Graph> graph_;
  VertexId root_ = 0;
  std::size_t root_index_ = 0;
  std::optional<int> horizon_;
  std::vector<int> dist_;
  std::vector<std::vector<std::uint32_t>> spheres_;
  std::optional<ModelTreeSpec> model_;
  std::vector<std::uint8_t> sides_;
};

/// Minimal interface a random walk (or any local exploration) needs.
template <class G>
concept WalkableGraph = requires(const G& g, VertexId v, std::size_t k) {
  { g.root() } -> std::convertible_to<VertexId>;
  { g.degree(v) } -> std::convertible_to<std::size_t>;
  { g.neighbor(v, k) } -> std::convertible_to<VertexId>;
  { g.distance(v) } -> std::convertible_to<int>;
};

/// The ball B_r(x0) with its interior / boundary split.
///
/// `all` is ordered by (distance, id); `interior` and `boundary` keep that
/// order. A vertex is interior iff every neighbor lies in the ball.
struct BallRestriction {
  int radius = 0;
  std::vector<VertexId> all;
  std::vector<VertexId> interior;
  std::vector<VertexId> boundary;
  std::vector<int> dist;            // parallel to `all`
  std::vector<bool> interior_flag;  // parallel to `all`
  std::unordered_map<VertexId, std::size_t> index;

  std::size_t size() const noexcept { return all.size(); }
  bool contains(VertexId v) const { return index.count(v) != 0; }
  std::size_t index_of(VertexId v) const {
    const auto it = index.find(v);
    if (it == index.end()) throw PreconditionError("vertex " + std::to_string(v) + " not in ball");
    return it->second;
  }
  bool is_interior(VertexId v) const { return interior_flag[index_of(v)]; }
  bool is_boundary(VertexId v) const { return !interior_flag[index_of(v)]; }
};

/// Materializes B_r around the root of `g`.
inline BallRestriction ball(const RootedGraph& g, int r, double vertex_cap = kDefaultVertexCap) {
  g.check_radius(r);
  BallRestriction b;
  b.radius = r;
  double count = 0;
  for (int d = 0; d <= r; ++d) count += static_cast<double>(g.sphere_indices(d).size());
  if (count > vertex_cap) throw CapError(count, vertex_cap);
  const auto& graph = g.graph();
  b.all.reserve(static_cast<std::size_t>(count));
  b.index.reserve(static_cast<std::size_t>(count));
  for (int d = 0; d <= r; ++d) {
    for (auto i : g.sphere_indices(d)) {
      bool inside = true;
      if (d == r)
        for (auto j : graph.neighbor_indices(i))
          if (g.distance_at(j) > r) {
            inside = false;
            break;
          }
      const VertexId v = graph.id(i);
      b.index.emplace(v, b.all.size());
      b.all.push_back(v);
      b.dist.push_back(d);
      b.interior_flag.push_back(inside);
      (inside ? b.interior : b.boundary).push_back(v);
    }
  }
  return b;
}

/// True when the subgraph spanned by `vertices` is connected.
inline bool is_connected(const Graph& g, std::span<const VertexId> vertices) {
  if (vertices.empty()) return true;
  std::unordered_map<VertexId, bool> seen;
  seen.reserve(vertices.size());
  for (auto v : vertices) seen.emplace(v, false);
  std::vector<VertexId> stack{vertices.front()};
  seen[vertices.front()] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (auto j : g.neighbor_indices(g.index_of(v))) {
      const auto it = seen.find(g.id(j));
      if (it != seen.end() && !it->second) {
        it->second = true;
        ++reached;
        stack.push_back(it->first);
      }
    }
  }
  return reached == vertices.size();
}

/// Extremal valence statistics over a sphere S_r (optionally S_r n H).
struct SphereStats {
  int r = 0;
  double size = 0;               // number of vertices taken into account
  std::uint64_t max_valence = 0;  // M(r)
  std::uint64_t min_valence = 0;
  std::uint64_t min_out = 0;  // lower m_{+1}(r)
  std::uint64_t max_in = 0;   // upper m_{-1}(r)
  std::uint64_t same_sphere_edges = 0;
};

/// Sphere statistics from the materialized graph. Returns nullopt when the
/// (restricted) sphere is empty, i.e. the graph is exhausted before r.
inline std::optional<SphereStats> sphere_stats(const RootedGraph& g, int r,
                                               std::optional<Side> restrict_to = std::nullopt) {
  g.check_radius(r);
  SphereStats s;
  s.r = r;
  s.min_valence = std::numeric_limits<std::uint64_t>::max();
  s.min_out = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t same = 0;
  for (auto i : g.sphere_indices(r)) {
    if (restrict_to && g.side_at(i) != *restrict_to) continue;
    const auto deg = static_cast<std::uint64_t>(g.graph().degree_at(i));
    const auto [out, in] = g.radial_degrees_at(i);
    s.size += 1;
    s.max_valence = std::max(s.max_valence, deg);
    s.min_valence = std::min(s.min_valence, deg);
    s.min_out = std::min<std::uint64_t>(s.min_out, out);
    s.max_in = std::max<std::uint64_t>(s.max_in, in);
    same += deg - out - in;
  }
  if (s.size == 0) return std::nullopt;
  s.same_sphere_edges = same / 2;
  return s;
}

/// Joins the root of `h` to the `anchors` of `hc` (default: the smallest id
/// of hc) after relabeling hc past the largest id of h. The result records
/// the H / H^C partition; the root of the result is the junction.
inline RootedGraph attach_at_vertex(const RootedGraph& h, const Graph& hc, VertexId junction,
                                    std::vector<VertexId> anchors = {}) {
  if (junction != h.root())
    throw PreconditionError("junction " + std::to_string(junction) + " is not the root of H");
  if (hc.size() == 0) throw PreconditionError("attached graph H^C is empty");
  if (!is_connected(hc, hc.vertices()))
    throw PreconditionError("attached graph H^C is not connected");
  if (anchors.empty()) anchors.push_back(hc.vertices().front());
  for (auto a : anchors)
    if (!hc.contains(a)) throw PreconditionError("anchor " + std::to_string(a) + " not in H^C");

  const auto& hg = h.graph();
  const VertexId offset = hg.vertices().back() + 1;
  if (hc.vertices().back() > std::numeric_limits<VertexId>::max() - offset)
    throw PreconditionError("vertex ids overflow while relabeling H^C");

  std::vector<VertexId> vertices(hg.vertices().begin(), hg.vertices().end());
  for (auto v : hc.vertices()) vertices.push_back(v + offset);
  std::vector<Edge> edges = hg.edges();
  for (const auto& [u, v] : hc.edges()) edges.emplace_back(u + offset, v + offset);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  for (auto a : anchors) edges.emplace_back(junction, a + offset);

  auto graph = std::make_shared<const Graph>(Graph::from_edges(std::move(vertices), edges));
  std::vector<std::uint8_t> sides(graph->size());
  for (std::size_t i = 0; i < graph->size(); ++i)
    sides[i] = graph->id(i) >= offset ? static_cast<std::uint8_t>(Side::complement)
                                      : static_cast<std::uint8_t>(Side::h);
  std::optional<int> horizon;
  if (h.has_declared_horizon()) horizon = h.horizon();
  RootedGraph out(std::move(graph), junction, horizon);
  out.set_model(h.model());
  out.set_sides(std::move(sides));
  return out;
}

}  // namespace graphheat

#endif  // GRAPHHEAT_GRAPH_HPP
