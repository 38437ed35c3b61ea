#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hypharm/cli.hpp"
#include "hypharm/io.hpp"

using namespace hypharm;
namespace fs = std::filesystem;

namespace {

const std::string kConfig = std::string(HYPHARM_SOURCE_DIR) + "/configs/default.ini";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hypharm");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hypharm_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small grids so that every command finishes in seconds.
std::vector<std::string> small_grids() {
  return {"--set", "grid.n_r=64",       "--set", "grid.n_theta=32", "--set", "grid.n_b=32",
          "--set", "grid.n_lambda=64",  "--set", "grid.n_h=64",     "--set", "smoothing.n_lambda=64",
          "--set", "smoothing.n_t=16",  "--set", "smoothing.family_size=2", "--set", "gain.n_t=16"};
}

}  // namespace

TEST(Cli, UsageOnMissingOrUnknownCommand) {
  const Result none = invoke({});
  EXPECT_EQ(none.code, cli::kExitUsage);
  EXPECT_NE(none.err.find("missing command"), std::string::npos);
  EXPECT_NE(none.err.find("usage: hypharm"), std::string::npos);
  const Result unknown = invoke({"frobnicate"});
  EXPECT_EQ(unknown.code, cli::kExitUsage);
  EXPECT_NE(unknown.err.find("unknown command 'frobnicate'"), std::string::npos);
  const Result bad_flag = invoke({"ctable", "--no-such-flag"});
  EXPECT_EQ(bad_flag.code, cli::kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const Result r = invoke({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out, cli::usage());
  for (const char* cmd : {"ctable", "transform", "propagate", "smoothing", "gain", "selftest"}) {
    EXPECT_NE(r.out.find(cmd), std::string::npos) << cmd;
  }
}

TEST(Cli, ConfigRequired) {
  EXPECT_EQ(invoke({"ctable"}).code, cli::kExitUsage);
  const Result missing = invoke({"ctable", "--config", "/nonexistent/x.ini"});
  EXPECT_EQ(missing.code, cli::kExitUsage);
  EXPECT_NE(missing.err.find("not found"), std::string::npos);
}

TEST(Cli, SmallDeltaRejectedBeforeAnyWork) {
  const fs::path dir = scratch("delta");
  const Result r = invoke({"smoothing", "--config", kConfig, "--out", dir.string(), "--set", "smoothing.delta=0.5"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("δ must exceed 1/2"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir));

  const fs::path ini = scratch("delta.ini");
  std::ofstream(ini) << "[gain]\ndelta = 0.45\n";
  const Result f = invoke({"gain", "--config", ini.string(), "--out", dir.string()});
  EXPECT_EQ(f.code, cli::kExitUsage);
  EXPECT_NE(f.err.find("delta.ini:2: "), std::string::npos) << f.err;
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, CtableWritesCsvAndJson) {
  const fs::path dir = scratch("ctable");
  const Result r = invoke({"ctable", "--config", kConfig, "--out", dir.string(), "--json", "--svg"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  ASSERT_TRUE(fs::exists(dir / "ctable.csv"));
  EXPECT_TRUE(fs::exists(dir / "ctable.svg"));
  std::ifstream in(dir / "ctable.csv");
  const io::CsvTable t = io::read_csv(in);
  EXPECT_EQ(t.columns.front(), "kind");
  const auto dev = t.column("relative_deviation");
  for (std::size_t q = 1; q < dev.size(); ++q) {
    EXPECT_LT(dev[q], 1e-8);
  }
  bool any_json = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    any_json = any_json || e.path().extension() == ".json";
  }
  EXPECT_TRUE(any_json);
}

TEST(Cli, IdenticalSeedsGiveIdenticalCsv) {
  std::vector<std::string> base = {"smoothing", "--config", kConfig, "--seed", "7", "--set",
                                   "smoothing.families=random_mix", "--jobs", "2"};
  for (const auto& s : small_grids()) {
    base.push_back(s);
  }
  auto run_into = [&](const std::string& name, const std::string& seed) {
    auto args = base;
    args[4] = seed;
    const fs::path dir = scratch(name);
    args.push_back("--out");
    args.push_back(dir.string());
    const Result r = invoke(args);
    EXPECT_NE(r.code, cli::kExitUsage) << r.err;
    return dir;
  };
  const fs::path a = run_into("seed_a", "7");
  const fs::path b = run_into("seed_b", "7");
  const fs::path c = run_into("seed_c", "8");
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") {
      continue;
    }
    ++compared;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
  EXPECT_GE(compared, 2);
  EXPECT_NE(slurp(a / "smoothing.csv"), slurp(c / "smoothing.csv"));
}

TEST(Cli, CommandsRunOnSmallGrids) {
  for (const char* cmd : {"transform", "propagate", "gain"}) {
    const fs::path dir = scratch(cmd);
    std::vector<std::string> args = {cmd, "--config", kConfig, "--out", dir.string()};
    for (const auto& s : small_grids()) {
      args.push_back(s);
    }
    const Result r = invoke(args);
    EXPECT_NE(r.code, cli::kExitUsage) << cmd << ": " << r.err;
    EXPECT_TRUE(fs::exists(dir / (std::string(cmd) + ".csv"))) << cmd;
  }
}

TEST(Cli, SelftestPassesAndDetectsCorruption) {
  const fs::path dir = scratch("selftest");
  const Result ok = invoke({"selftest", "--out", dir.string()});
  EXPECT_EQ(ok.code, cli::kExitOk) << ok.out;
  EXPECT_NE(ok.out.find("\"selftest\":\"PASS\""), std::string::npos);
  EXPECT_EQ(ok.out.find("FAIL "), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "selftest.json"));

  const Result bad = invoke({"selftest", "--corrupt-c0", "2"});
  EXPECT_EQ(bad.code, cli::kExitFail);
  EXPECT_NE(bad.out.find("FAIL "), std::string::npos);
}

TEST(Cli, SelftestUnderOneMinute) {
  const cli::SelftestResult r = cli::cmd_selftest();
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.seconds, 60.0);
  EXPECT_GT(r.checks.size(), 20u);
}
