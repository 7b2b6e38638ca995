#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using graphheat::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("graphheat-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "graphheat");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    log_.str("");
    return graphheat::cli::run(static_cast<int>(argv.size()), argv.data(), log_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string tree(const std::string& branching, int depth) {
    const auto p = path("tree.json");
    EXPECT_EQ(run({"gen-tree", "--branching", branching, "--depth", std::to_string(depth), "-o", p}), 0) << log_.str();
    return p;
  }

  fs::path dir_;
  std::ostringstream log_;
};

}  // namespace

TEST_F(Cli, GenTreeWritesGraphAndManifest) {
  const auto p = tree("constant:2", 8);
  const auto j = json::parse(slurp(p));
  EXPECT_EQ(j["vertices"].size(), 511u);
  EXPECT_EQ(j["edges"].size(), 510u);
  const auto m = json::parse(slurp(p + ".manifest.json"));
  EXPECT_EQ(m["subcommand"], "gen-tree");
  EXPECT_EQ(m["outputs"][0]["fnv1a64"], graphheat::cli::hex64(graphheat::cli::fnv1a64(slurp(p))));
}

TEST_F(Cli, CompleteCertifiesBinaryTree) {
  const auto p = tree("constant:2", 8);
  const auto out = path("complete");
  EXPECT_EQ(run({"complete", p, "--lambda", "-1", "--horizon", "12", "-o", out}), 0) << log_.str();
  const auto cert = json::parse(slurp(out + "/certificate.json"));
  EXPECT_EQ(cert["verdict"], "complete-certified");
  EXPECT_TRUE(fs::exists(out + "/manifest.json"));
}

TEST_F(Cli, CompleteRequireCertifiedRefusesUntaggedGraph) {
  const auto p = path("random.json");
  std::ofstream(p) << graphheat::graph_to_json(graphheat::fixtures::random_tree(200, 3)).dump();
  const auto out = path("complete");
  EXPECT_EQ(run({"complete", p, "--horizon", "6", "--require-certified", "-o", out}), 1) << log_.str();
  EXPECT_TRUE(fs::exists(out + "/certificate.json"));
  EXPECT_TRUE(fs::exists(out + "/refusal.json"));
}

TEST_F(Cli, HeatRegeneratesBeyondStoredDepth) {
  const auto p = tree("constant:2", 8);
  const auto out = path("heat");
  EXPECT_EQ(run({"heat", p, "--t", "0.5,1,2", "--radii", "6,9,12", "-o", out}), 0) << log_.str();
  const auto manifest = json::parse(slurp(out + "/manifest.json"));
  EXPECT_EQ(manifest["config"]["regenerated_depth"], 13);
  const auto summary = json::parse(slurp(out + "/summary.json"));
  EXPECT_TRUE(summary["converged"].get<bool>());
  const auto mass = slurp(out + "/mass.csv");
  EXPECT_EQ(mass.rfind("radius,t,mass\n", 0), 0u);
  EXPECT_EQ(mass.find('\r'), std::string::npos);
}

TEST_F(Cli, CsvNumbersRoundTrip) {
  const auto out = path("mass");
  EXPECT_EQ(run({"mass", "--branching", "geometric:2", "--t", "1", "--radii", "4,8", "-o", out}), 0) << log_.str();
  std::istringstream csv(slurp(out + "/mass.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "radius,t,mass");
  const double t[] = {1.0};
  const auto expected = graphheat::radial_mass(graphheat::ModelTreeSpec::geometric(2), 8, t)[0];
  double last = 0;
  while (std::getline(csv, line)) last = std::stod(line.substr(line.rfind(',') + 1));
  EXPECT_EQ(last, expected);
}

TEST_F(Cli, MalformedJsonIsAUsageError) {
  const auto p = path("bad.json");
  std::ofstream(p) << "{\"vertices\": [0, 1,";
  EXPECT_EQ(run({"heat", p, "--radii", "1", "-o", path("heat")}), 2);
  EXPECT_NE(log_.str().find("byte"), std::string::npos) << log_.str();
}

TEST_F(Cli, CapBreachExitsWithOne) {
  EXPECT_EQ(run({"gen-tree", "--branching", "geometric:2", "--depth", "8", "--cap", "1000", "-o", path("g.json")}), 1);
  EXPECT_NE(log_.str().find("memory-cap"), std::string::npos) << log_.str();
}

TEST_F(Cli, HorizonBreachOnUntaggedGraph) {
  const auto p = path("path.json");
  std::ofstream(p) << graphheat::graph_to_json(graphheat::fixtures::random_tree(50, 2)).dump();
  EXPECT_EQ(run({"spectrum", p, "--radii", "200", "-o", path("s")}), 1);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"heat"}), 2);
  const auto p = tree("constant:2", 5);
  EXPECT_EQ(run({"heat", p, "--radii", "3,2", "-o", path("h")}), 2);
  EXPECT_EQ(run({"complete", p, "--lambda", "1", "-o", path("c")}), 2);
  EXPECT_EQ(run({"--version"}), 0);
}

TEST_F(Cli, ManifestHashesAreReproducible) {
  const auto p = tree("geometric:2", 4);
  EXPECT_EQ(run({"spectrum", p, "--radii", "1,2,3", "-o", path("a")}), 0) << log_.str();
  EXPECT_EQ(run({"spectrum", p, "--radii", "1,2,3", "-o", path("b")}), 0) << log_.str();
  const auto a = json::parse(slurp(path("a") + "/manifest.json"));
  const auto b = json::parse(slurp(path("b") + "/manifest.json"));
  EXPECT_EQ(a["inputs"], b["inputs"]);
  ASSERT_EQ(a["outputs"].size(), b["outputs"].size());
  for (std::size_t i = 0; i < a["outputs"].size(); ++i) EXPECT_EQ(a["outputs"][i]["fnv1a64"], b["outputs"][i]["fnv1a64"]);
  EXPECT_EQ(slurp(path("a") + "/lambda0.csv"), slurp(path("b") + "/lambda0.csv"));
}

TEST_F(Cli, EssentialSpectrumUsesRuleBeyondStoredDepth) {
  const auto p = tree("geometric:2", 5);
  const auto out = path("s");
  EXPECT_EQ(run({"spectrum", p, "--radii", "3,4", "--remove-ball", "1", "--ess-horizon", "12", "-o", out}), 0)
      << log_.str();
  const auto j = json::parse(slurp(out + "/spectrum.json"));
  EXPECT_FALSE(json::parse(slurp(out + "/manifest.json"))["config"].contains("regenerated_depth"));
  EXPECT_NE(j.dump().find("empty"), std::string::npos);
}

TEST_F(Cli, CompareRefusesWhenHypothesisFails) {
  const auto p = tree("constant:3", 5);
  const auto out = path("cmp");
  EXPECT_EQ(run({"compare", p, "--branching", "constant:2", "--direction", "lower", "--radius", "3", "-o", out}), 1);
  EXPECT_TRUE(fs::exists(out + "/refusal.json"));
}

TEST_F(Cli, SimulateIsSeeded) {
  const auto out1 = path("s1"), out2 = path("s2");
  const std::vector<std::string> common{"simulate", "--branching", "constant:2", "--t", "1", "--radius", "5",
                                        "--trials", "5000", "--seed", "9"};
  auto a1 = common, a2 = common;
  a1.insert(a1.end(), {"-o", out1});
  a2.insert(a2.end(), {"-o", out2, "--threads", "3"});
  EXPECT_EQ(run(a1), 0) << log_.str();
  EXPECT_EQ(run(a2), 0) << log_.str();
  const auto j1 = json::parse(slurp(out1 + "/simulation.json"));
  const auto j2 = json::parse(slurp(out2 + "/simulation.json"));
  EXPECT_EQ(j1["survivors"], j2["survivors"]);
}
