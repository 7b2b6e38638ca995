#ifndef GRAPHHEAT_FIXTURES_HPP
#define GRAPHHEAT_FIXTURES_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "graphheat/graph.hpp"
#include "graphheat/model_tree.hpp"
#include "graphheat/montecarlo.hpp"

// Small deterministic graphs used by the test suite and `validate`.
namespace graphheat::fixtures {

/// Portable seeded generator (splitmix64 stream).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return splitmix64(state_); }
  std::size_t below(std::size_t k) { return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * k) >> 64); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline RootedGraph make(std::vector<VertexId> vertices, const std::vector<Edge>& edges, VertexId root) {
  return RootedGraph(std::make_shared<const Graph>(Graph::from_edges(std::move(vertices), edges)), root);
}

inline std::vector<VertexId> iota(std::size_t n) {
  std::vector<VertexId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

inline RootedGraph path(std::size_t n, VertexId root = 0) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make(iota(n), e, root);
}

inline RootedGraph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return make(iota(n), e, 0);
}

inline RootedGraph complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return make(iota(n), e, 0);
}

/// K_k with a path of `tail` vertices hanging off vertex k-1; rooted at 0.
inline RootedGraph lollipop(std::size_t k, std::size_t tail) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) e.emplace_back(i, j);
  for (std::size_t i = 0; i < tail; ++i) e.emplace_back(k - 1 + i, k + i);
  return make(iota(k + tail), e, 0);
}

/// `legs` paths of length `length` joined at the root 0.
inline RootedGraph spider(std::size_t legs, std::size_t length) {
  std::vector<Edge> e;
  VertexId next = 1;
  for (std::size_t l = 0; l < legs; ++l) {
    VertexId prev = 0;
    for (std::size_t i = 0; i < length; ++i, ++next) {
      e.emplace_back(prev, next);
      prev = next;
    }
  }
  return make(iota(next), e, 0);
}

inline RootedGraph grid(std::size_t w, std::size_t h, VertexId root, bool torus = false) {
  std::vector<Edge> e;
  auto id = [w](std::size_t x, std::size_t y) { return static_cast<VertexId>(y * w + x); };
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (x + 1 < w) e.emplace_back(id(x, y), id(x + 1, y));
      else if (torus) e.emplace_back(id(x, y), id(0, y));
      if (y + 1 < h) e.emplace_back(id(x, y), id(x, y + 1));
      else if (torus) e.emplace_back(id(x, y), id(x, 0));
    }
  return make(iota(w * h), e, root);
}

inline RootedGraph ladder(std::size_t n, VertexId root = 0) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) {
    e.emplace_back(i, n + i);
    if (i + 1 < n) {
      e.emplace_back(i, i + 1);
      e.emplace_back(n + i, n + i + 1);
    }
  }
  return make(iota(2 * n), e, root);
}

inline RootedGraph hypercube(int dim) {
  const std::size_t n = std::size_t{1} << dim;
  std::vector<Edge> e;
  for (std::size_t v = 0; v < n; ++v)
    for (int b = 0; b < dim; ++b) {
      const std::size_t w = v ^ (std::size_t{1} << b);
      if (v < w) e.emplace_back(v, w);
    }
  return make(iota(n), e, 0);
}

/// Uniform random recursive tree on n vertices, rooted at 0.
inline RootedGraph random_tree(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> e;
  for (std::size_t v = 1; v < n; ++v) e.emplace_back(rng.below(v), v);
  return make(iota(n), e, 0);
}

/// Random tree plus `extra` distinct non-tree edges.
inline RootedGraph random_connected(std::size_t n, std::size_t extra, std::uint64_t seed) {
  Rng rng(seed);
  std::set<Edge> e;
  for (std::size_t v = 1; v < n; ++v) e.emplace(rng.below(v), v);
  while (e.size() < n - 1 + extra) {
    auto a = rng.below(n), b = rng.below(n);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    e.emplace(a, b);
  }
  return make(iota(n), std::vector<Edge>(e.begin(), e.end()), 0);
}

/// Explicit ray 0 - 1 - ... - (n-1) rooted at its end, without a rule tag.
inline RootedGraph ray(std::size_t n) { return path(n, 0); }

/// Binary tree (n = 2) to `depth`, plus a cycle through each sphere S_r,
/// 2 <= r < depth. Outward and inward valences stay those of the tree.
inline RootedGraph binary_with_sphere_edges(int depth) {
  const auto tree = build_model_tree(ModelTreeSpec::constant(2), depth);
  auto edges = tree.graph().edges();
  for (int r = 2; r < depth; ++r) {
    const std::uint64_t size = std::uint64_t{1} << r;
    for (std::uint64_t i = 0; i < size; ++i) edges.emplace_back(tree_vertex(r, i), tree_vertex(r, (i + 1) % size));
  }
  std::vector<VertexId> vertices(tree.graph().vertices().begin(), tree.graph().vertices().end());
  auto g = std::make_shared<const Graph>(Graph::from_edges(std::move(vertices), edges));
  return RootedGraph(std::move(g), tree.root(), depth - 1);
}

/// Subtree of the binary tree to `depth` in which every non-root vertex keeps
/// each child with probability 3/4 (at least one child per vertex on
/// spheres < depth/2, so the ball stays deep).
inline RootedGraph binary_valence_reduced(int depth, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VertexId> vertices{tree_vertex(0, 0)};
  std::vector<Edge> edges;
  std::vector<std::uint64_t> level{0};
  for (int r = 0; r < depth; ++r) {
    std::vector<std::uint64_t> next;
    for (auto i : level) {
      bool kept = false;
      for (std::uint64_t k = 0; k < 2; ++k) {
        const bool keep = r == 0 || rng.uniform() < 0.75 || (!kept && k == 1 && 2 * r < depth);
        if (!keep) continue;
        kept = true;
        const auto child = 2 * i + k;
        next.push_back(child);
        vertices.push_back(tree_vertex(r + 1, child));
        edges.emplace_back(tree_vertex(r, i), tree_vertex(r + 1, child));
      }
    }
    level = std::move(next);
  }
  return make(std::move(vertices), edges, tree_vertex(0, 0));
}

/// Geometric tree H (n(r) = 2^(r+1)) to `depth` with a cycle C_k attached
/// at the root.
inline RootedGraph attached_example(int depth, std::size_t k) {
  const auto h = build_model_tree(ModelTreeSpec::geometric(2), depth);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
  const auto hc = Graph::from_edges(iota(k), e);
  return attach_at_vertex(h, hc, h.root());
}

struct KernelFixture {
  std::string name;
  RootedGraph graph;
  int radius = 1;
};

/// Twenty graphs whose balls have at most 1000 vertices and a non-empty
/// boundary.
inline std::vector<KernelFixture> kernel_fixtures() {
  std::vector<KernelFixture> f;
  f.push_back({"path-11", path(11, 5), 4});
  f.push_back({"cycle-16", cycle(16), 5});
  f.push_back({"lollipop-5-6", lollipop(5, 6), 3});
  f.push_back({"spider-8x3", spider(8, 3), 2});
  f.push_back({"grid-9x9", grid(9, 9, 40), 3});
  f.push_back({"grid-12x7-corner", grid(12, 7, 0), 5});
  f.push_back({"binary-tree", build_model_tree(ModelTreeSpec::constant(2), 8), 5});
  f.push_back({"ternary-tree", build_model_tree(ModelTreeSpec::constant(3), 6), 4});
  f.push_back({"geometric-tree", build_model_tree(ModelTreeSpec::geometric(2), 4), 3});
  f.push_back({"linear-tree", build_model_tree(ModelTreeSpec::polynomial(1), 6), 5});
  f.push_back({"random-tree-300", random_tree(300, 1), 4});
  f.push_back({"random-tree-500", random_tree(500, 2), 6});
  f.push_back({"random-graph-200", random_connected(200, 100, 3), 3});
  f.push_back({"random-graph-400", random_connected(400, 50, 4), 5});
  f.push_back({"ladder-30", ladder(30, 0), 6});
  f.push_back({"binary-sphere-edges", binary_with_sphere_edges(7), 4});
  f.push_back({"binary-reduced", binary_valence_reduced(9, 5), 6});
  f.push_back({"attached-cycle", attached_example(4, 5), 3});
  f.push_back({"hypercube-6", hypercube(6), 3});
  f.push_back({"torus-10x10", grid(10, 10, 0, true), 4});
  return f;
}

}  // namespace graphheat::fixtures

#endif  // GRAPHHEAT_FIXTURES_HPP
