#include <json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

/// Runs the CLI with stderr folded into stdout.
Result run(const std::string& args) {
  const std::string command = std::string(KPSUPPORT_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::string out;
  std::array<char, 4096> buffer;
  while (std::size_t n = std::fread(buffer.data(), 1, buffer.size(), pipe)) out.append(buffer.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kpsupport_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, NormDualProjectExamples) {
  EXPECT_EQ(run("norm --k 2 --p 2 --vec 3,2,1").out, "4.242640687119\n");
  EXPECT_EQ(run("norm --k 2 --p inf --vec 3,2,1").out, "3\n");
  EXPECT_EQ(run("project --k 1 --alpha 1 --vec 2,0.5").out, "1,0\n");
  EXPECT_EQ(run("dual --k 1 --p 2 --vec 3,-4").out, "4\n");
  EXPECT_EQ(run("norm --k 1 --p 7 --vec 1,-2").out, "3\n");
}

TEST(Cli, MatrixInput) {
  const fs::path dir = scratch("matrix");
  std::ofstream(dir / "w.csv") << "3,0,0\n0,2,0\n0,0,1\n";
  EXPECT_EQ(run("norm --k 2 --p 2 --matrix-file " + (dir / "w.csv").string()).out, "4.242640687119\n");
  EXPECT_EQ(run("dual --k 2 --p inf --matrix-file " + (dir / "w.csv").string()).out, "5\n");
  const Result projected = run("project --k 1 --alpha 1 --matrix-file " + (dir / "w.csv").string());
  EXPECT_EQ(projected.status, 0);
  EXPECT_EQ(projected.out, "1,0,0\n0,0,0\n0,0,0\n");
}

TEST(Cli, MalformedInputFails) {
  for (const char* args : {"norm --k 2 --p 2 --vec 3,x", "norm --k 0 --vec 1", "norm --k 3 --vec 1,2",
                           "norm --k 1 --p 0.5 --vec 1", "norm --k 1 --p lots --vec 1", "norm --k 1",
                           "project --k 1 --alpha -1 --vec 1", "bogus", "synth --rho 2 --trials 1",
                           "synth --protocol flat --decays 0.1,0.2", "real --dataset movielens --path /nonexistent"}) {
    const Result r = run(args);
    EXPECT_NE(r.status, 0) << args;
    EXPECT_FALSE(r.out.empty()) << args;
  }
}

TEST(Cli, SynthIsByteIdenticalAcrossRuns) {
  const fs::path dir = scratch("synth");
  std::ofstream(dir / "grid.json") << R"({"alphas": [10, 40], "ps": [1, 2, "inf"], "ks": [1, 2]})";
  const std::string base = "synth --protocol flat --d 20 --m 16 --r 2 --rho 0.5 --trials 1 --seed 5 --max-iters 30 "
                           "--grid-file " + (dir / "grid.json").string() + " --out ";
  const Result a = run(base + (dir / "a").string());
  const Result b = run(base + (dir / "b").string());
  ASSERT_EQ(a.status, 0) << a.out;
  ASSERT_EQ(b.status, 0) << b.out;
  EXPECT_EQ(a.out, b.out);
  for (const char* file : {"cells.csv", "summary.csv", "error_vs_p.csv", "summary.json"}) {
    const std::string content = slurp(dir / "a" / file);
    EXPECT_FALSE(content.empty()) << file;
    EXPECT_EQ(content, slurp(dir / "b" / file)) << file;
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  EXPECT_EQ(summary.at("seed"), 5);
  EXPECT_TRUE(summary.contains("version"));
  EXPECT_EQ(summary.at("config").at("protocol"), "flat");
  EXPECT_EQ(summary.at("config").at("grid").at("ps").back(), "inf");
  EXPECT_EQ(summary.at("methods").size(), 3u);
  EXPECT_EQ(slurp(dir / "a" / "cells.csv").substr(0, 13), "trial,seed,k,");
  // 2 alphas x 3 ps x 2 ks plus the header.
  const std::string cells = slurp(dir / "a" / "cells.csv");
  EXPECT_EQ(std::count(cells.begin(), cells.end(), '\n'), 13);
}

TEST(Cli, DecaySweepWritesCurves) {
  const fs::path dir = scratch("decay");
  std::ofstream(dir / "grid.json") << R"({"alphas": [10, 40], "ps": [1, 2, "inf"], "ks": [1, 2]})";
  const Result r = run("synth --protocol decay --d 20 --m 16 --r 3 --rho 0.5 --decays 0,0.5,1 --max-iters 20 "
                       "--grid-file " + (dir / "grid.json").string() + " --out " + (dir / "out").string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("spearman"), std::string::npos);
  const std::string decay = slurp(dir / "out" / "decay.csv");
  EXPECT_EQ(decay.substr(0, 11), "a,optimal_p");
  EXPECT_EQ(std::count(decay.begin(), decay.end(), '\n'), 4);
  EXPECT_FALSE(slurp(dir / "out" / "decay_curves.csv").empty());
}

TEST(Cli, RealMovieLensSanity) {
  const fs::path dir = scratch("real");
  {
    std::ofstream data(dir / "u.data");
    for (int u = 1; u <= 12; ++u)
      for (int i = 1; i <= 10; ++i) data << u << '\t' << i << '\t' << 1 + (u * i) % 5 << '\t' << 880000000 << '\n';
  }
  std::ofstream(dir / "grid.json") << R"({"alphas": [300], "ps": [1], "ks": [1]})";
  const std::string args = "real --dataset movielens --path " + (dir / "u.data").string() +
                           " --grid-file " + (dir / "grid.json").string() + " --max-iters 400 --gap-tol 1e-9";
  const Result sane = run(args + " --sanity --out " + (dir / "sane").string());
  ASSERT_EQ(sane.status, 0) << sane.out;
  const auto summary = nlohmann::json::parse(slurp(dir / "sane" / "summary.json"));
  EXPECT_LT(summary.at("methods")[0].at("mean_test").get<double>(), 0.02);
  EXPECT_EQ(summary.at("config").at("metric"), "nmae");

  const Result split1 = run(args + " --trials 2 --seed 3");
  const Result split2 = run(args + " --trials 2 --seed 3");
  ASSERT_EQ(split1.status, 0) << split1.out;
  EXPECT_EQ(split1.out, split2.out);
}

}  // namespace
