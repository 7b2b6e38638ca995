#ifndef GRAPHHEAT_MODEL_TREE_HPP
#define GRAPHHEAT_MODEL_TREE_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "graphheat/graph.hpp"
#include "graphheat/model_spec.hpp"

namespace graphheat {

/// Tree vertex ids pack (level, index-in-level): level in the top 8 bits.
inline constexpr int kLevelShift = 56;
inline constexpr std::uint64_t kIndexMask = (std::uint64_t{1} << kLevelShift) - 1;
inline constexpr int kMaxLevel = 255;

constexpr VertexId tree_vertex(int level, std::uint64_t index) {
  return (static_cast<std::uint64_t>(level) << kLevelShift) | index;
}
constexpr int tree_level(VertexId v) { return static_cast<int>(v >> kLevelShift); }
constexpr std::uint64_t tree_index(VertexId v) { return v & kIndexMask; }

/// |S_r| of the model tree, as a real (saturates to +inf).
inline double model_sphere_size(const ModelTreeSpec& spec, int r) {
  double size = 1.0;
  for (int i = 0; i < r; ++i) size *= spec.n(i);
  return size;
}

/// Number of vertices of the model tree truncated at `depth`.
inline double model_vertex_count(const ModelTreeSpec& spec, int depth) {
  double total = 0.0, sphere = 1.0;
  for (int r = 0; r <= depth; ++r) {
    total += sphere;
    if (r < depth) sphere *= spec.n(r);
  }
  return total;
}

/// Materializes the model tree T_n down to sphere S_depth.
///
/// The result is a generated graph whose horizon is depth - 1: vertices on
/// S_depth are present but their children are not, so balls of radius up to
/// depth - 1 are exact.
inline RootedGraph build_model_tree(const ModelTreeSpec& spec, int depth,
                                    double vertex_cap = kDefaultVertexCap) {
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  if (depth > kMaxLevel) throw PreconditionError("depth exceeds the packed level range");
  for (int r = 0; r < depth; ++r) spec.n(r);
  const double total = model_vertex_count(spec, depth);
  if (total > vertex_cap) throw CapError(total, vertex_cap);

  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  vertices.reserve(static_cast<std::size_t>(total));
  edges.reserve(static_cast<std::size_t>(total));
  vertices.push_back(tree_vertex(0, 0));
  std::uint64_t level_size = 1;
  for (int r = 0; r < depth; ++r) {
    const std::uint64_t branching = spec.count(r);
    const std::uint64_t next_size = level_size * branching;
    if (next_size > kIndexMask) throw CapError(static_cast<double>(next_size), static_cast<double>(kIndexMask));
    for (std::uint64_t i = 0; i < level_size; ++i)
      for (std::uint64_t j = 0; j < branching; ++j) {
        const VertexId child = tree_vertex(r + 1, i * branching + j);
        vertices.push_back(child);
        edges.emplace_back(tree_vertex(r, i), child);
      }
    level_size = next_size;
  }
  auto graph = std::make_shared<const Graph>(Graph::from_edges(std::move(vertices), edges));
  RootedGraph out(std::move(graph), tree_vertex(0, 0), depth - 1);
  out.set_model(spec);
  return out;
}

/// Drops the declared horizon: the truncated tree viewed as a finite graph.
inline RootedGraph as_finite(const RootedGraph& g) {
  RootedGraph out(g.graph_ptr(), g.root());
  if (g.has_partition()) {
    std::vector<std::uint8_t> sides(g.graph().size());
    for (std::size_t i = 0; i < sides.size(); ++i)
      sides[i] = static_cast<std::uint8_t>(g.side_at(i));
    out.set_sides(std::move(sides));
  }
  return out;
}

/// Exact sphere statistics of the infinite model tree, from the rule alone.
inline SphereStats model_sphere_stats(const ModelTreeSpec& spec, int r) {
  SphereStats s;
  s.r = r;
  s.size = model_sphere_size(spec, r);
  const auto n = spec.count(r);
  s.max_valence = s.min_valence = r == 0 ? n : n + 1;
  s.min_out = n;
  s.max_in = r == 0 ? 0 : 1;
  return s;
}

/// The infinite model tree as an adjacency oracle; nothing is materialized.
/// Neighbor 0 of a non-root vertex is its parent, the remaining ones its
/// children in index order.
class ModelTree {
 public:
  explicit ModelTree(ModelTreeSpec spec) : spec_(std::move(spec)) {
    double size = 1.0;
    horizon_ = 0;
    // S_{r+1} must be addressable for S_r to have complete neighborhoods.
    for (int r = 0; r + 1 < kMaxLevel; ++r) {
      if (spec_.last_defined() && r > *spec_.last_defined()) break;
      size *= spec_.n(r);
      if (size > static_cast<double>(kIndexMask)) break;
      horizon_ = r;
    }
  }

  const ModelTreeSpec& spec() const noexcept { return spec_; }
  int horizon() const noexcept { return horizon_; }

  VertexId root() const noexcept { return tree_vertex(0, 0); }
  int distance(VertexId v) const noexcept { return tree_level(v); }

  std::size_t degree(VertexId v) const {
    const int r = tree_level(v);
    const auto n = static_cast<std::size_t>(spec_.count(r));
    return r == 0 ? n : n + 1;
  }

  /// m_{+1}(v): the number of children.
  std::size_t out_degree(VertexId v) const { return static_cast<std::size_t>(spec_.count(tree_level(v))); }

  VertexId neighbor(VertexId v, std::size_t k) const {
    const int r = tree_level(v);
    const std::uint64_t i = tree_index(v);
    if (r > 0) {
      if (k == 0) return tree_vertex(r - 1, i / spec_.count(r - 1));
      --k;
    }
    return tree_vertex(r + 1, i * spec_.count(r) + k);
  }

 private:
  ModelTreeSpec spec_;
  int horizon_ = 0;
};

static_assert(WalkableGraph<ModelTree>);
static_assert(WalkableGraph<RootedGraph>);

}  // namespace graphheat

#endif  // GRAPHHEAT_MODEL_TREE_HPP
