#ifndef GRAPHHEAT_TOOLS_CLI_HPP
#define GRAPHHEAT_TOOLS_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "graphheat.hpp"
#include "graphheat/validation.hpp"

// Batch front end. Every subcommand writes its results and a manifest.json
// into an output directory (gen-tree writes the graph file and
// <file>.manifest.json next to it).
namespace graphheat::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kRefused = 1, kUsage = 2 };

/// Structured refusal: the command ran but declines to certify.
class Refusal : public Error {
 public:
  Refusal(const std::string& what, json report) : Error(what), report_(std::move(report)) {}
  const json& report() const noexcept { return report_; }

 private:
  json report_;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Files written by one run, collected for the manifest.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::string& contents) { write(dir_ / name, contents); }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  void write(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("cannot write " + path.string());
    out << contents;
    if (!out) throw PreconditionError("write failed: " + path.string());
    written_.push_back({{"path", path.string()}, {"fnv1a64", hex64(fnv1a64(contents))}});
  }

  const fs::path& dir() const noexcept { return dir_; }
  const json& written() const noexcept { return written_; }

 private:
  fs::path dir_;
  json written_ = json::array();
};

/// Inputs, configuration and versions of a run.
struct Manifest {
  std::string subcommand;
  std::vector<std::string> argv;
  json inputs = json::array();
  json config = json::object();

  void input(const std::string& path, const std::string& bytes) {
    inputs.push_back({{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
  }

  json to_json(const Outputs& out) const {
    json versions{{"graphheat", kVersion},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                  {"cli11", CLI11_VERSION},
                  {"compiler", __VERSION__}};
    return {{"tool", "graphheat"}, {"subcommand", subcommand}, {"argv", argv},       {"inputs", inputs},
            {"config", config},    {"versions", versions},     {"outputs", out.written()}};
  }
};

/// CSV with a header row, LF line endings and %.17g numbers.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }

  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }

  std::string str() const { return os_.str(); }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }

  std::ostringstream os_;
};

// ---------------------------------------------------------------------------

struct LoadedGraph {
  RootedGraph graph;
  std::string path;
};

inline LoadedGraph load_graph(const std::string& path, Manifest& manifest) {
  const auto bytes = read_file(path);
  manifest.input(path, bytes);
  return {graph_from_json(parse_json(bytes, path)), path};
}

/// A generated model tree is rebuilt from its rule when a computation needs
/// spheres past the stored horizon.
inline RootedGraph with_horizon(const RootedGraph& g, int needed, Manifest& manifest) {
  if (!g.has_declared_horizon() || needed <= g.horizon()) return g;
  if (!g.model() || !g.model()->tagged() || g.has_partition()) throw HorizonError(needed, g.horizon());
  manifest.config["regenerated_depth"] = needed + 1;
  return build_model_tree(*g.model(), needed + 1);
}

inline void check_increasing(const std::vector<int>& v, const char* what) {
  if (v.empty()) throw CLI::ValidationError(what, "must not be empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) throw CLI::ValidationError(what, "must be strictly increasing");
}

inline void check_times(const std::vector<double>& t) {
  if (t.empty()) throw CLI::ValidationError("--t", "must not be empty");
  for (double x : t)
    if (!(x >= 0)) throw CLI::ValidationError("--t", "times must be non-negative");
}

inline std::vector<VertexId> ball_vertices(const RootedGraph& g, int r) {
  std::vector<VertexId> out;
  if (r < 0) return out;
  const auto b = ball(g, r);
  return b.all;
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns an exit code and fills `out`.

struct GenTreeArgs {
  std::string branching;
  int depth = 0;
  std::string output;
  double cap = kDefaultVertexCap;
};

inline int gen_tree(const GenTreeArgs& a, Manifest& m, std::ostream& log) {
  const auto spec = parse_branching(a.branching);
  m.config = {{"branching", to_json(spec)}, {"depth", a.depth}, {"vertex_cap", a.cap}};
  const auto g = build_model_tree(spec, a.depth, a.cap);
  const std::string doc = graph_to_json(g).dump() + "\n";
  if (a.output.empty() || a.output == "-") {
    std::cout << doc;
    return kOk;
  }
  Outputs out(fs::path(a.output).parent_path());
  out.write(a.output, doc);
  out.write(a.output + ".manifest.json", m.to_json(out).dump(2) + "\n");
  log << "wrote " << a.output << " (" << g.graph().size() << " vertices, horizon " << g.horizon() << ")\n";
  return kOk;
}

struct HeatArgs {
  std::string input;
  std::vector<double> times{0.5, 1.0, 2.0};
  std::vector<int> radii;
  std::optional<VertexId> source;
  std::string method = "automatic";
  double eps = 1e-6;
  std::optional<int> window;
};

inline ExpmMethod parse_method(const std::string& s) {
  if (s == "automatic") return ExpmMethod::automatic;
  if (s == "eigendecomposition") return ExpmMethod::eigendecomposition;
  if (s == "scaling-and-squaring") return ExpmMethod::scaling_and_squaring;
  throw CLI::ValidationError("--method", "unknown method " + s);
}

inline int heat(const HeatArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  check_times(a.times);
  check_increasing(a.radii, "--radii");
  auto loaded = load_graph(a.input, m);
  const VertexId source = a.source.value_or(loaded.graph.root());
  const int offset = std::max(0, loaded.graph.distance(source));
  const auto g = with_horizon(loaded.graph, a.radii.back() + offset, m);
  ExhaustionOptions opt;
  opt.eps = a.eps;
  opt.window_radius = a.window;
  opt.method = parse_method(a.method);
  opt.keep_kernels = true;
  m.config.update({{"times", a.times}, {"radii", a.radii}, {"source", source}, {"method", a.method}, {"eps", a.eps}});
  const auto ex = exhaustion(g, source, a.times, a.radii, opt);

  Csv kernel({"radius", "t", "vertex", "distance", "p"});
  for (const auto& k : ex.kernels)
    for (double t : ex.times)
      for (auto v : ex.window) kernel.row(k.radius, t, std::to_string(v), g.distance(v), k.value(t, v));
  Csv mass({"radius", "t", "mass"});
  for (std::size_t i = 0; i < ex.radii.size(); ++i)
    for (std::size_t k = 0; k < ex.times.size(); ++k) mass.row(ex.radii[i], ex.times[k], ex.masses[i][k]);
  out.text("kernel.csv", kernel.str());
  out.text("mass.csv", mass.str());
  out.json_file("summary.json", to_json(ex));
  log << "exhaustion over radii";
  for (int r : ex.radii) log << ' ' << r;
  log << ": " << (ex.converged ? "converged" : "not converged") << ", error bar " << fmt17(ex.error_bar)
      << ", worst monotonicity " << fmt17(ex.worst_monotonicity) << "\n";
  return kOk;
}

struct MassArgs {
  std::string input;
  std::string branching;
  std::vector<double> times{0.5, 1.0, 2.0};
  std::vector<int> radii;
  double eps = 1e-6;
};

inline int mass(const MassArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  check_times(a.times);
  check_increasing(a.radii, "--radii");
  m.config.update({{"times", a.times}, {"radii", a.radii}, {"eps", a.eps}});
  Csv csv({"radius", "t", "mass"});
  json summary;
  if (!a.branching.empty()) {
    // Radial reduction: no graph is materialized.
    const auto spec = parse_branching(a.branching);
    m.config["branching"] = to_json(spec);
    const auto re = radial_exhaustion(spec, a.times, a.radii, a.eps);
    for (std::size_t i = 0; i < re.radii.size(); ++i)
      for (std::size_t k = 0; k < a.times.size(); ++k) csv.row(re.radii[i], a.times[k], re.masses[i][k]);
    summary = {{"method", "radial"}, {"radii", re.radii}, {"times", re.times}, {"masses", re.masses},
               {"mass_gaps", re.mass_gaps}, {"kernel_gaps", re.kernel_gaps}, {"converged", re.converged}};
  } else {
    if (a.input.empty()) throw CLI::ValidationError("mass", "give a graph file or --branching");
    auto loaded = load_graph(a.input, m);
    const auto g = with_horizon(loaded.graph, a.radii.back(), m);
    ExhaustionOptions opt;
    opt.eps = a.eps;
    const auto ex = exhaustion(g, g.root(), a.times, a.radii, opt);
    for (std::size_t i = 0; i < ex.radii.size(); ++i)
      for (std::size_t k = 0; k < ex.times.size(); ++k) csv.row(ex.radii[i], ex.times[k], ex.masses[i][k]);
    summary = to_json(ex);
    summary["method"] = "exhaustion";
  }
  out.text("mass.csv", csv.str());
  out.json_file("summary.json", summary);
  log << "mass at the last radius:";
  const auto& last = summary["masses"].back();
  for (std::size_t k = 0; k < a.times.size(); ++k) log << " t=" << fmt17(a.times[k]) << ": " << fmt17(last[k]);
  log << "\n";
  return kOk;
}

struct CompleteArgs {
  std::string input;
  std::vector<double> lambdas{-0.25, -1.0, -4.0};
  int horizon = 12;
  std::vector<double> times{0.5, 1.0, 2.0};
  bool require_certified = false;
};

inline int complete(const CompleteArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  for (double l : a.lambdas)
    if (!(l < 0)) throw CLI::ValidationError("--lambda", "lambda must be negative");
  if (a.horizon < 1) throw CLI::ValidationError("--horizon", "must be >= 1");
  check_times(a.times);
  auto loaded = load_graph(a.input, m);
  CompletenessConfig cfg;
  cfg.lambdas = a.lambdas;
  cfg.horizon = a.horizon;
  cfg.times = a.times;
  m.config.update({{"lambdas", a.lambdas}, {"horizon", a.horizon}, {"times", a.times},
                   {"require_certified", a.require_certified}});
  const auto cert = completeness_verdict(loaded.graph, cfg);
  const json j = to_json(cert);
  out.json_file("certificate.json", j);
  log << "verdict: " << to_string(cert.verdict) << "\n";
  if (a.require_certified && cert.verdict == Verdict::inconclusive)
    throw Refusal("no criterion certifies a verdict", j);
  return kOk;
}

struct SpectrumArgs {
  std::string input;
  std::vector<int> radii;
  int remove_ball = -1;
  std::optional<int> cheeger_radius;
  int cheeger_size = 8;
  int ess_horizon = 0;
};

inline int spectrum(const SpectrumArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  check_increasing(a.radii, "--radii");
  auto loaded = load_graph(a.input, m);
  const auto g = with_horizon(loaded.graph, std::max(a.radii.back(), a.cheeger_radius.value_or(0)), m);
  const auto removed = ball_vertices(g, a.remove_ball);
  m.config.update({{"radii", a.radii}, {"remove_ball", a.remove_ball}, {"cheeger_size", a.cheeger_size},
                   {"ess_horizon", a.ess_horizon}});
  if (a.cheeger_radius) m.config["cheeger_radius"] = *a.cheeger_radius;
  std::optional<EssSpectrumCertificate> ess;
  // Spheres past the stored depth come from the branching rule.
  if (a.ess_horizon > 0) ess = ess_spectrum_certificate(loaded.graph, a.ess_horizon);

  const auto curv = curvature_bound(g, removed, a.radii.back());
  if (!curv.hypothesis_ok) {
    // No curvature bound; report the truncated bottoms alone.
    json j{{"c", curv.c}, {"curvature_argmin", curv.argmin}, {"lambda0_by_radius", json::array()}};
    for (int r : a.radii) {
      const auto b = ball(g, r);
      const auto gp = lambda0(assemble_complement(g, removed, b, LaplacianKind::physical));
      const auto gb = lambda0(assemble_complement(g, removed, b, LaplacianKind::bounded));
      j["lambda0_by_radius"].push_back({{"r", r}, {"value", gp.lambda0}, {"bounded", gb.lambda0}});
    }
    if (ess) j["certificates"] = json::array({to_json(*ess)});
    out.json_file("spectrum.json", j);
    throw Refusal("curvature constant c = " + fmt17(curv.c) + " is not positive; no lower bound", j);
  }
  const auto sb = lambda0_lower_bounds(g, removed, a.radii, a.cheeger_radius, a.cheeger_size);
  Csv csv({"radius", "lambda0_physical", "lambda0_bounded", "bound_physical", "bound_bounded"});
  for (std::size_t i = 0; i < sb.radii.size(); ++i)
    csv.row(sb.radii[i], sb.lambda0_physical[i], sb.lambda0_bounded[i], sb.bound_physical, sb.bound_bounded);
  out.text("lambda0.csv", csv.str());
  out.json_file("spectrum.json", to_json(sb, ess));
  log << "c = " << fmt17(sb.curvature.c) << ", lambda0 >= " << fmt17(sb.bound_physical) << " (physical), "
      << fmt17(sb.bound_bounded) << " (bounded); " << (sb.respected ? "respected" : "VIOLATED") << "\n";
  if (ess) log << "essential spectrum: " << (ess->empty_certified ? "empty-certified" : "inconclusive") << "\n";
  return sb.respected ? kOk : kRefused;
}

struct CheegerArgs {
  std::string input;
  int radius = 3;
  int max_size = 8;
  double budget = 1e6;
  int remove_ball = -1;
};

inline int cheeger(const CheegerArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  auto loaded = load_graph(a.input, m);
  const auto g = with_horizon(loaded.graph, a.radius + 1, m);
  const auto removed = ball_vertices(g, a.remove_ball);
  m.config.update(
      {{"radius", a.radius}, {"max_size", a.max_size}, {"budget", a.budget}, {"remove_ball", a.remove_ball}});
  const auto res = cheeger_exact(g, removed, a.radius, a.max_size, static_cast<std::uint64_t>(a.budget));
  json j{{"alpha_upper", res.alpha},        {"argmin", res.argmin},           {"sets_enumerated", res.sets_enumerated},
         {"universe", res.universe},        {"max_set_size", res.max_set_size}, {"scope", res.scope}};
  const auto curv = curvature_bound(g, removed, a.radius);
  j["curvature_c"] = curv.c;
  out.json_file("cheeger.json", j);
  log << "alpha <= " << fmt17(res.alpha) << " over " << res.sets_enumerated << " sets; c = " << fmt17(curv.c) << "\n";
  return kOk;
}

struct CompareArgs {
  std::string input;
  std::string branching;
  std::vector<double> times{0.5, 1.0, 2.0};
  int radius = 4;
  std::string direction = "lower";
  std::optional<VertexId> source;
  double slack = 1e-9;
};

inline int compare(const CompareArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  check_times(a.times);
  auto loaded = load_graph(a.input, m);
  std::optional<ModelTreeSpec> spec;
  if (!a.branching.empty()) spec = parse_branching(a.branching);
  else if (loaded.graph.model()) spec = *loaded.graph.model();
  if (!spec) throw CLI::ValidationError("--branching", "required when the graph carries no rule");
  if (a.direction != "lower" && a.direction != "upper")
    throw CLI::ValidationError("--direction", "expected lower or upper");
  const auto dir = a.direction == "lower" ? ComparisonDirection::lower : ComparisonDirection::upper;
  const VertexId source = a.source.value_or(loaded.graph.root());
  const auto g = with_horizon(loaded.graph, a.radius + std::max(0, loaded.graph.distance(source)), m);
  m.config.update({{"branching", to_json(*spec)}, {"times", a.times}, {"radius", a.radius},
                   {"direction", a.direction}, {"source", source}, {"slack", a.slack}});
  const auto rep = compare_with_model(g, source, *spec, a.times, dir, a.radius, a.slack);
  json j{{"direction", a.direction}, {"radius", rep.radius}, {"hypothesis_ok", rep.hypothesis_ok},
         {"compared", rep.compared}};
  if (rep.violation)
    j["violation"] = {{"vertex", rep.violation->vertex}, {"r", rep.violation->r},   {"m_out", rep.violation->m_out},
                      {"m_in", rep.violation->m_in},     {"n", rep.violation->branching}, {"reason", rep.violation->reason}};
  if (rep.compared) {
    j.update({{"holds", rep.holds},
              {"worst_margin", rep.worst_margin},
              {"worst_vertex", rep.worst_vertex},
              {"worst_time", rep.worst_time},
              {"max_abs_difference", rep.max_abs_difference}});
    const auto rho = radial_kernel(*spec, a.radius, a.times);
    Csv csv({"t", "r", "rho"});
    for (std::size_t k = 0; k < a.times.size(); ++k)
      for (int r = 0; r <= a.radius; ++r) csv.row(a.times[k], r, rho.values[k][static_cast<std::size_t>(r)]);
    out.text("rho.csv", csv.str());
  }
  out.json_file("comparison.json", j);
  if (!rep.hypothesis_ok) throw Refusal("valence hypothesis fails: " + rep.violation->reason, j);
  log << "comparison (" << a.direction << "): " << (rep.holds ? "holds" : "FAILS") << ", worst margin "
      << fmt17(rep.worst_margin) << "\n";
  return rep.holds ? kOk : kRefused;
}

struct SimulateArgs {
  std::string input;
  std::string branching;
  double t = 1.0;
  int radius = 4;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  std::string rate = "physical";
  std::optional<VertexId> source;
  std::vector<VertexId> targets;
  unsigned threads = 1;
};

template <WalkableGraph G>
json simulate_on(const G& g, const WalkConfig& cfg, const std::vector<VertexId>& targets) {
  json j = to_json(survival_estimate(g, cfg));
  if (!targets.empty()) {
    const auto occ = occupancy_estimate(g, cfg, targets);
    j["occupancy"] = json::array();
    for (std::size_t i = 0; i < targets.size(); ++i)
      j["occupancy"].push_back({{"vertex", targets[i]}, {"p_hat", occ.p_hat[i]}, {"stderr", occ.stderr_[i]}});
  }
  return j;
}

inline int simulate(const SimulateArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  if (a.rate != "physical" && a.rate != "bounded") throw CLI::ValidationError("--rate", "expected physical or bounded");
  WalkConfig cfg;
  cfg.t = a.t;
  cfg.radius = a.radius;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.rate = a.rate == "physical" ? WalkRate::physical : WalkRate::bounded;
  cfg.threads = a.threads;
  m.config = {{"t", a.t},       {"radius", a.radius}, {"trials", a.trials}, {"seed", a.seed},
              {"rate", a.rate}, {"targets", a.targets}};
  json j;
  if (!a.branching.empty()) {
    const ModelTree tree(parse_branching(a.branching));
    m.config["branching"] = to_json(tree.spec());
    cfg.source = a.source.value_or(tree.root());
    m.config["source"] = cfg.source;
    j = simulate_on(tree, cfg, a.targets);
  } else {
    if (a.input.empty()) throw CLI::ValidationError("simulate", "give a graph file or --branching");
    auto loaded = load_graph(a.input, m);
    cfg.source = a.source.value_or(loaded.graph.root());
    m.config["source"] = cfg.source;
    const auto g = with_horizon(loaded.graph, a.radius, m);
    j = simulate_on(g, cfg, a.targets);
  }
  out.json_file("simulation.json", j);
  log << "p_hat = " << fmt17(j["p_hat"].get<double>()) << " +- " << fmt17(j["stderr"].get<double>()) << " (N = "
      << a.trials << ")\n";
  if (j["censored_fraction"].get<double>() > 0)
    log << "warning: " << fmt17(j["censored_fraction"].get<double>())
        << " of the walks hit the step cap and were counted as survivors\n";
  return kOk;
}

struct ValidateArgs {
  std::vector<int> criteria;
};

inline int validate(const ValidateArgs& a, Manifest& m, Outputs& out, std::ostream& log) {
  for (int id : a.criteria)
    if (id < 1 || id > 10) throw CLI::ValidationError("--criteria", "ids are 1..10");
  m.config = {{"criteria", a.criteria}, {"fixture_set", "builtin"}};
  bool ok = true;
  json j = json::array();
  for (const auto& r : validation::run(a.criteria)) {
    std::cout << validation::summary_line(r) << "\n";
    for (const auto& d : r.details) log << "    " << d << "\n";
    ok = ok && r.passed;
    j.push_back({{"id", r.id},
                 {"name", r.name},
                 {"passed", r.passed},
                 {"seconds", r.seconds},
                 {"budget_seconds", r.budget_seconds},
                 {"details", r.details}});
  }
  out.json_file("validation.json", j);
  return ok ? kOk : kRefused;
}

// ---------------------------------------------------------------------------

inline json cap_report(const std::exception& e) {
  json j{{"error", e.what()}};
  if (const auto* h = dynamic_cast<const HorizonError*>(&e)) {
    j["kind"] = "horizon";
    j["requested"] = h->requested();
    j["horizon"] = h->horizon();
  } else if (const auto* c = dynamic_cast<const CapError*>(&e)) {
    j["kind"] = "memory-cap";
    j["needed"] = c->needed();
    j["cap"] = c->cap();
  } else if (const auto* b = dynamic_cast<const BudgetError*>(&e)) {
    j["kind"] = "enumeration-budget";
    j["budget"] = b->budget();
  }
  return j;
}

inline int run(int argc, const char* const* argv, std::ostream& log = std::cerr) {
  CLI::App app{"Heat kernels, stochastic completeness and spectra of graphs", "graphheat"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  std::string outdir;
  app.add_option("-o,--out", outdir, "output directory (gen-tree: output file)");

  GenTreeArgs gt;
  auto* c_gen = app.add_subcommand("gen-tree", "materialize a model tree");
  c_gen->add_option("--branching", gt.branching, "constant:K, geometric:B[:A], polynomial:D[:A] or list:n0,n1,...")
      ->required();
  c_gen->add_option("--depth", gt.depth, "depth of the tree")->required()->check(CLI::NonNegativeNumber);
  c_gen->add_option("--cap", gt.cap, "vertex cap");

  HeatArgs ht;
  auto* c_heat = app.add_subcommand("heat", "Dirichlet kernels along an exhaustion");
  c_heat->add_option("graph", ht.input, "graph JSON")->required();
  c_heat->add_option("--t", ht.times, "times")->delimiter(',');
  c_heat->add_option("--radii", ht.radii, "radius schedule")->delimiter(',')->required();
  c_heat->add_option("--source", ht.source, "source vertex (default root)");
  c_heat->add_option("--method", ht.method, "automatic, eigendecomposition or scaling-and-squaring");
  c_heat->add_option("--eps", ht.eps, "convergence tolerance")->check(CLI::PositiveNumber);
  c_heat->add_option("--window", ht.window, "reporting window radius");

  MassArgs ms;
  auto* c_mass = app.add_subcommand("mass", "total heat along an exhaustion");
  c_mass->add_option("graph", ms.input, "graph JSON");
  c_mass->add_option("--branching", ms.branching, "use the radial reduction of this model tree");
  c_mass->add_option("--t", ms.times, "times")->delimiter(',');
  c_mass->add_option("--radii", ms.radii, "radius schedule")->delimiter(',')->required();
  c_mass->add_option("--eps", ms.eps, "convergence tolerance")->check(CLI::PositiveNumber);

  CompleteArgs cp;
  auto* c_complete = app.add_subcommand("complete", "stochastic completeness verdict");
  c_complete->add_option("graph", cp.input, "graph JSON")->required();
  c_complete->add_option("--lambda", cp.lambdas, "negative lambda values")->delimiter(',');
  c_complete->add_option("--horizon", cp.horizon, "criterion horizon");
  c_complete->add_option("--t", cp.times, "times for mass evidence")->delimiter(',');
  c_complete->add_flag("--require-certified", cp.require_certified, "exit 1 when inconclusive");

  SpectrumArgs sp;
  auto* c_spec = app.add_subcommand("spectrum", "bottom of the spectrum and its lower bounds");
  c_spec->add_option("graph", sp.input, "graph JSON")->required();
  c_spec->add_option("--radii", sp.radii, "truncation radii")->delimiter(',')->required();
  c_spec->add_option("--remove-ball", sp.remove_ball, "remove B_a(root) before computing");
  c_spec->add_option("--cheeger-radius", sp.cheeger_radius, "also enumerate Cheeger sets within this radius");
  c_spec->add_option("--cheeger-size", sp.cheeger_size, "largest enumerated set");
  c_spec->add_option("--ess-horizon", sp.ess_horizon, "essential-spectrum certificate over this horizon");

  CheegerArgs ch;
  auto* c_cheeger = app.add_subcommand("cheeger", "Cheeger constant by connected-set enumeration");
  c_cheeger->add_option("graph", ch.input, "graph JSON")->required();
  c_cheeger->add_option("--radius", ch.radius, "working radius");
  c_cheeger->add_option("--max-size", ch.max_size, "largest set size");
  c_cheeger->add_option("--budget", ch.budget, "enumeration budget");
  c_cheeger->add_option("--remove-ball", ch.remove_ball, "remove B_a(root) first");

  CompareArgs cm;
  auto* c_cmp = app.add_subcommand("compare", "compare the kernel with a model tree");
  c_cmp->add_option("graph", cm.input, "graph JSON")->required();
  c_cmp->add_option("--branching", cm.branching, "model rule (default: the graph's own)");
  c_cmp->add_option("--t", cm.times, "times")->delimiter(',');
  c_cmp->add_option("--radius", cm.radius, "Dirichlet radius");
  c_cmp->add_option("--direction", cm.direction, "lower (p >= rho) or upper (p <= rho)");
  c_cmp->add_option("--source", cm.source, "source vertex (default root)");
  c_cmp->add_option("--slack", cm.slack, "tolerance");

  SimulateArgs sm;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo survival and occupancy");
  c_sim->add_option("graph", sm.input, "graph JSON");
  c_sim->add_option("--branching", sm.branching, "walk on the implicit model tree instead");
  c_sim->add_option("--t", sm.t, "time");
  c_sim->add_option("--radius", sm.radius, "absorbing radius");
  c_sim->add_option("--trials", sm.trials, "number of walks");
  c_sim->add_option("--seed", sm.seed, "64-bit seed");
  c_sim->add_option("--rate", sm.rate, "physical (rate m(x)) or bounded (rate 1)");
  c_sim->add_option("--source", sm.source, "source vertex (default root)");
  c_sim->add_option("--targets", sm.targets, "occupancy targets")->delimiter(',');
  c_sim->add_option("--threads", sm.threads, "worker threads");

  ValidateArgs va;
  auto* c_val = app.add_subcommand("validate", "run the acceptance suite");
  c_val->add_option("--criteria", va.criteria, "criterion ids (default all)")->delimiter(',');

  Manifest manifest;
  for (int i = 1; i < argc; ++i) manifest.argv.emplace_back(argv[i]);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, log);
    return code == 0 ? kOk : kUsage;
  }
  auto* sub = app.get_subcommands().front();
  manifest.subcommand = sub->get_name();

  try {
    if (sub == c_gen) {
      gt.output = outdir;
      return gen_tree(gt, manifest, log);
    }
    Outputs out(outdir.empty() ? fs::path("graphheat-" + manifest.subcommand) : fs::path(outdir));
    auto finish = [&](int code) {
      out.json_file("manifest.json", manifest.to_json(out));
      log << "results in " << out.dir().string() << "\n";
      return code;
    };
    try {
      if (sub == c_heat) return finish(heat(ht, manifest, out, log));
      if (sub == c_mass) return finish(mass(ms, manifest, out, log));
      if (sub == c_complete) return finish(complete(cp, manifest, out, log));
      if (sub == c_spec) return finish(spectrum(sp, manifest, out, log));
      if (sub == c_cheeger) return finish(cheeger(ch, manifest, out, log));
      if (sub == c_cmp) return finish(compare(cm, manifest, out, log));
      if (sub == c_sim) return finish(simulate(sm, manifest, out, log));
      if (sub == c_val) return finish(validate(va, manifest, out, log));
    } catch (const Refusal& r) {
      log << "refused: " << r.what() << "\n";
      out.json_file("refusal.json", {{"refused", r.what()}, {"report", r.report()}});
      return finish(kRefused);
    }
  } catch (const CLI::ValidationError& e) {
    log << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    log << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    log << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const HorizonError& e) {
    log << "cap breach: " << cap_report(e).dump() << "\n";
    return kRefused;
  } catch (const CapError& e) {
    log << "cap breach: " << cap_report(e).dump() << "\n";
    return kRefused;
  } catch (const BudgetError& e) {
    log << "cap breach: " << cap_report(e).dump() << "\n";
    return kRefused;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kRefused;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace graphheat::cli

#endif  // GRAPHHEAT_TOOLS_CLI_HPP
