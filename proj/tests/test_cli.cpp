#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SNDP_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string sample(const std::string& name) { return std::string(SNDP_SAMPLES_DIR) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sndp_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, SolveTriangleWithImprovement) {
  const auto r = run("solve " + sample("k3.graph") + " --improve");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["report_version"], 1);
  EXPECT_EQ(j["solution"]["weight"], 3);
  EXPECT_EQ(j["solution"]["feasible"], true);
  EXPECT_EQ(j["heuristic"]["weight"], 4);
  EXPECT_EQ(j["mst_substituted"], true);
  EXPECT_FALSE(j["disclaimers"].empty());
}

TEST(Cli, SolveTriangleWithoutImprovement) {
  const auto r = run("solve " + sample("k3.graph") + " --no-improve");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["solution"]["weight"], 4);
  EXPECT_EQ(j["improvement_moves"], 0);
}

TEST(Cli, ReportsAreByteIdentical) {
  const auto a = run("solve " + sample("steiner6.graph") + " --trace");
  const auto b = run("solve " + sample("steiner6.graph") + " --trace");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(json::parse(a.out).contains("trace"));
}

TEST(Cli, OutFileMatchesStdout) {
  const auto path = scratch("k3.json");
  ASSERT_EQ(run("solve " + sample("k3.graph") + " --out " + path.string()).code, 0);
  EXPECT_EQ(slurp(path), run("solve " + sample("k3.graph")).out);
}

TEST(Cli, CostModelAndConfigFile) {
  const auto q = json::parse(run("solve " + sample("cycle4.graph") + " --cost-model quantum_cited --kappa 1").out);
  EXPECT_EQ(q["config"]["cost_model"], "quantum_cited");
  EXPECT_EQ(q["config"]["kappa"], 1);

  const auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"apsp": {"cost_model": "classical_cited"}})";
  const auto c = json::parse(run("solve " + sample("cycle4.graph") + " --config " + cfg.string()).out);
  EXPECT_EQ(c["config"]["cost_model"], "classical_cited");

  const auto b = json::parse(run("solve " + sample("cycle4.graph") + " --bandwidth-b 5").out);
  EXPECT_EQ(b["stats"]["total"]["bandwidth_B"], 10);
  EXPECT_EQ(run("solve " + sample("cycle4.graph") + " --cost-model nonsense").code, 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("solve " + sample("malformed.graph")).code, 2);
  EXPECT_EQ(run("solve " + sample("does-not-exist.graph")).code, 2);
  EXPECT_EQ(run("solve " + sample("split.graph")).code, 3);
  EXPECT_EQ(run("frobnicate").code, 2);

  const auto big = scratch("n9.graph");
  ASSERT_EQ(run("gen --n 9 --rmax 3 --seed 2 --out " + big.string()).code, 0);
  EXPECT_EQ(run("audit " + big.string() + " --cap 3").code, 5);
}

TEST(Cli, AuditBlocks) {
  const auto k3 = json::parse(run("audit " + sample("k3.graph") + " --no-improve").out);
  EXPECT_EQ(k3["command"], "audit");
  EXPECT_EQ(k3["audit"]["ratio"], "4/3");
  EXPECT_EQ(k3["audit"]["optimum"], 3);
  EXPECT_EQ(k3["audit"]["within_bound"], true);

  const auto path = json::parse(run("audit " + sample("path4.graph")).out);
  EXPECT_EQ(path["audit"]["ratio"], "1");
}

TEST(Cli, GeneratorIsDeterministic) {
  const auto a = run("gen --n 8 --seed 1"), b = run("gen --n 8 --seed 1");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, run("gen --n 8 --seed 2").out);

  const auto complete = run("gen --n 6 --density 1");
  std::istringstream in(complete.out);
  std::size_t n = 0, m = 0;
  in >> n >> m;
  EXPECT_EQ(n, 6u);
  EXPECT_EQ(m, 15u);

  const auto zero = scratch("zero.graph");
  ASSERT_EQ(run("gen --n 7 --rmax 0 --out " + zero.string()).code, 0);
  const auto j = json::parse(run("solve " + zero.string()).out);
  EXPECT_EQ(j["solution"]["weight"], 0);
}

TEST(Cli, ApspDump) {
  const auto r = run("apsp " + sample("path4.graph"));
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["distances"][0][3], 6);
  EXPECT_EQ(j["distances"][3][1], 4);
  EXPECT_EQ(j["routing"][0][3], 2);
  EXPECT_TRUE(j["routing"][2][2].is_null());
}
