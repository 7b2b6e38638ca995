#ifndef GRAPHHEAT_MONTECARLO_HPP
#define GRAPHHEAT_MONTECARLO_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <unordered_map>
#include <vector>

#include "graphheat/error.hpp"
#include "graphheat/graph.hpp"

namespace graphheat {

enum class WalkRate {
  physical,  // leave x at rate m(x): generator -Lap
  bounded    // leave at rate 1: generator -Lap_bd
};

struct WalkConfig {
  VertexId source = 0;
  double t = 1.0;
  int radius = 1;  // absorb on the boundary of B_radius(root)
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  WalkRate rate = WalkRate::physical;
  std::uint64_t step_cap = 1'000'000;
  unsigned threads = 1;
};

struct SurvivalEstimate {
  double p_hat = 0;
  double stderr_ = 0;
  std::uint64_t trials = 0;
  std::uint64_t survivors = 0;
  std::uint64_t censored = 0;
  double censored_fraction() const { return trials ? static_cast<double>(censored) / static_cast<double>(trials) : 0.0; }
};

struct OccupancyEstimate {
  std::vector<VertexId> targets;
  std::vector<double> p_hat;
  std::vector<double> stderr_;
  std::uint64_t trials = 0;
  std::uint64_t censored = 0;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

inline constexpr std::uint64_t kTrialsPerBlock = 4096;

/// Stream for block b: mt19937_64 seeded with two splitmix64 outputs of
/// seed + b. Blocks are fixed, so results do not depend on the thread count.
inline std::mt19937_64 block_stream(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t state = seed ^ (block * 0xd1b54a32d192ed03ULL);
  std::seed_seq seq{splitmix64(state), splitmix64(state)};
  return std::mt19937_64(seq);
}

// Explicit transforms keep the stream-to-sample map independent of the
// standard library's distribution implementations.
inline double unit_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}
inline std::size_t uniform_below(std::mt19937_64& rng, std::size_t k) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * k) >> 64);
}

/// Absorbing set: vertices of S_r with a neighbor on S_{r+1}.
template <WalkableGraph G>
bool on_boundary(const G& g, VertexId v, int r) {
  if (g.distance(v) != r) return false;
  if constexpr (requires { g.out_degree(v); }) {
    return g.out_degree(v) > 0;
  } else {
    for (std::size_t k = g.degree(v); k-- > 0;)
      if (g.distance(g.neighbor(v, k)) > r) return true;
    return false;
  }
}

struct WalkOutcome {
  bool alive = false;
  bool censored = false;
  VertexId at = 0;
};

template <WalkableGraph G>
WalkOutcome walk(const G& g, const WalkConfig& cfg, std::mt19937_64& rng) {
  VertexId v = cfg.source;
  double now = 0.0;
  std::uint64_t steps = 0;
  while (true) {
    const std::size_t m = g.degree(v);
    if (m == 0) return {true, false, v};
    const double rate = cfg.rate == WalkRate::physical ? static_cast<double>(m) : 1.0;
    now += -std::log(unit_open(rng)) / rate;
    if (now > cfg.t) return {true, false, v};
    v = g.neighbor(v, uniform_below(rng, m));
    if (on_boundary(g, v, cfg.radius)) return {false, false, v};
    if (++steps >= cfg.step_cap) return {true, true, v};
  }
}

template <class Block>
void run_blocks(std::uint64_t blocks, unsigned threads, Block&& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || blocks <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) body(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i)
    pool.emplace_back([&] {
      for (std::uint64_t b = next++; b < blocks; b = next++) body(b);
    });
  for (auto& th : pool) th.join();
}

template <WalkableGraph G>
void check_config(const G& g, const WalkConfig& cfg) {
  if (cfg.trials < 1) throw PreconditionError("need at least one trial");
  if (!(cfg.t >= 0)) throw PreconditionError("negative time");
  if (cfg.radius < 1) throw PreconditionError("radius must be >= 1");
  if constexpr (requires { g.horizon(); })
    if (cfg.radius > g.horizon()) throw HorizonError(cfg.radius, g.horizon());
  if (g.distance(cfg.source) < 0 || g.distance(cfg.source) > cfg.radius)
    throw PreconditionError("source outside the ball");
  if (on_boundary(g, cfg.source, cfg.radius)) throw PreconditionError("source lies on the absorbing boundary");
}

}  // namespace detail

/// Fraction of walks from the source still inside int B_r at time t.
/// Walks hitting the step cap count as survivors and are reported as
/// censored.
template <WalkableGraph G>
SurvivalEstimate survival_estimate(const G& g, const WalkConfig& cfg) {
  detail::check_config(g, cfg);
  const std::uint64_t blocks = (cfg.trials + detail::kTrialsPerBlock - 1) / detail::kTrialsPerBlock;
  std::vector<std::uint64_t> alive(blocks, 0), censored(blocks, 0);
  detail::run_blocks(blocks, cfg.threads, [&](std::uint64_t b) {
    auto rng = detail::block_stream(cfg.seed, b);
    const std::uint64_t begin = b * detail::kTrialsPerBlock;
    const std::uint64_t end = std::min(cfg.trials, begin + detail::kTrialsPerBlock);
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto out = detail::walk(g, cfg, rng);
      alive[b] += out.alive;
      censored[b] += out.censored;
    }
  });
  SurvivalEstimate est;
  est.trials = cfg.trials;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    est.survivors += alive[b];
    est.censored += censored[b];
  }
  const auto n = static_cast<double>(cfg.trials);
  est.p_hat = static_cast<double>(est.survivors) / n;
  est.stderr_ = std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
  return est;
}

/// Per-target estimates of p_t^r(source, y): fraction of walks alive at y at
/// time t.
template <WalkableGraph G>
OccupancyEstimate occupancy_estimate(const G& g, const WalkConfig& cfg, const std::vector<VertexId>& targets) {
  detail::check_config(g, cfg);
  std::unordered_map<VertexId, std::size_t> slot;
  for (std::size_t i = 0; i < targets.size(); ++i) slot.emplace(targets[i], i);
  const std::uint64_t blocks = (cfg.trials + detail::kTrialsPerBlock - 1) / detail::kTrialsPerBlock;
  std::vector<std::vector<std::uint64_t>> hits(blocks, std::vector<std::uint64_t>(targets.size(), 0));
  std::vector<std::uint64_t> censored(blocks, 0);
  detail::run_blocks(blocks, cfg.threads, [&](std::uint64_t b) {
    auto rng = detail::block_stream(cfg.seed, b);
    const std::uint64_t begin = b * detail::kTrialsPerBlock;
    const std::uint64_t end = std::min(cfg.trials, begin + detail::kTrialsPerBlock);
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto out = detail::walk(g, cfg, rng);
      censored[b] += out.censored;
      if (!out.alive) continue;
      if (const auto it = slot.find(out.at); it != slot.end()) ++hits[b][it->second];
    }
  });
  OccupancyEstimate est;
  est.targets = targets;
  est.trials = cfg.trials;
  const auto n = static_cast<double>(cfg.trials);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    std::uint64_t total = 0;
    for (std::uint64_t b = 0; b < blocks; ++b) total += hits[b][k];
    const double p = static_cast<double>(total) / n;
    est.p_hat.push_back(p);
    est.stderr_.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  for (auto c : censored) est.censored += c;
  return est;
}

}  // namespace graphheat

#endif  // GRAPHHEAT_MONTECARLO_HPP
