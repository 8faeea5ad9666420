#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using splinefit::cli::run;

namespace {

const std::string kEnso = SPLINEFIT_DATA_DIR "/enso.csv";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<double> column(const std::string& csv, std::size_t index) {
  std::vector<double> values;
  const auto lines = lines_of(csv);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::istringstream fields(lines[k]);
    std::string cell;
    for (std::size_t c = 0; c <= index; ++c) std::getline(fields, cell, ',');
    values.push_back(std::stod(cell));
  }
  return values;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("splinefit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

// Sample values used to check that every documented option parses.
const std::map<std::string, std::string> kSamples{
    {"--x-col", "month"},          {"--y-col", "pressure"},      {"--delimiter", ","},
    {"--rescale", "unit"},         {"--family", "bspline"},      {"--degree", "2"},
    {"--knots", "5"},              {"--placement", "quantile"},  {"--penalty", "none"},
    {"--diff-order", "1"},         {"--lambda", "0"},            {"--select", "aic"},
    {"--lambda-min", "0.01"},      {"--lambda-max", "100"},      {"--lambda-count", "5"},
    {"--solver", "augmented"},     {"--seed", "3"},              {"--model-out", "m.json"},
    {"--curve-out", "c.csv"},      {"--curve-points", "10"},     {"--at", "1,2"},
    {"--points-from", "p.csv"},    {"--out", "o.csv"},           {"--kind", "simulated"},
    {"--alpha", "0.1"},            {"--points", "7"},            {"--draws", "2000"},
    {"--preset", "tp-table2"},     {"--degrees", "1,2"},         {"--diff-orders", "0,1"},
    {"--fraction", "0.7"},         {"--split-mode", "head"},     {"--out-prefix", "r"},
    {"--formats", "csv,json"},     {"--window", "3"},
};

}  // namespace

TEST(CliHelp, EveryOptionIsDocumented) {
  const auto table = splinefit::cli::option_table();
  ASSERT_FALSE(table.empty());
  for (const auto& opt : table) {
    const auto help = splinefit::cli::help_text(opt.subcommand);
    EXPECT_NE(help.find(opt.name), std::string::npos) << opt.subcommand << " " << opt.name;
    EXPECT_FALSE(opt.description.empty()) << opt.subcommand << " " << opt.name;
    if (!opt.flag && !opt.positional) {
      const bool documented = !opt.default_value.empty() || opt.description.find("default") != std::string::npos;
      EXPECT_TRUE(documented) << opt.subcommand << " " << opt.name << " has no documented default";
    }
  }
  const auto top = splinefit::cli::help_text("");
  for (const auto& sub : splinefit::cli::subcommand_names()) EXPECT_NE(top.find(sub), std::string::npos);
}

TEST(CliHelp, EveryDocumentedOptionParses) {
  // The input path does not exist, so a successful parse ends in IoError
  // rather than a usage message.
  for (const auto& opt : splinefit::cli::option_table()) {
    if (opt.positional) continue;
    std::vector<std::string> args{opt.subcommand, "/nonexistent/input.csv", opt.name};
    if (!opt.flag) {
      const auto sample = kSamples.find(opt.name);
      ASSERT_NE(sample, kSamples.end()) << "no sample value for " << opt.name;
      args.push_back(sample->second);
    }
    const auto r = invoke(args);
    EXPECT_NE(r.err.find("IoError"), std::string::npos) << opt.subcommand << " " << opt.name << ": " << r.err;
  }
}

TEST(CliHelp, HelpExitsZero) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  const auto r = invoke({"fit", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--diff-order"), std::string::npos);
}

TEST(CliUsage, BadArgumentsExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"fit", kEnso, "--family", "wavelet"}).code, 2);
  EXPECT_EQ(invoke({"fit", kEnso, "--no-such-flag"}).code, 2);
  EXPECT_EQ(invoke({"fit", kEnso, "--degree", "two"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
}

TEST_F(Cli, FitWritesModelAndCurve) {
  const auto r = invoke({"fit", kEnso, "--family", "pspline", "--degree", "2", "--knots", "80", "--diff-order", "1",
                         "--select", "gcv", "--model-out", path("m.json"), "--curve-out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = nlohmann::json::parse(slurp(path("m.json")));
  const double edf = model["edf"].get<double>();
  EXPECT_TRUE(std::isfinite(edf));
  EXPECT_LE(edf, 83.0);
  EXPECT_EQ(model["coefficients"].size(), 83u);
  const auto curve = lines_of(slurp(path("c.csv")));
  ASSERT_EQ(curve.size(), 501u);
  EXPECT_EQ(curve[0], "z,fitted");
  EXPECT_EQ(column(slurp(path("c.csv")), 0).front(), 1.0);
  EXPECT_EQ(column(slurp(path("c.csv")), 0).back(), 168.0);
}

TEST_F(Cli, FitIsDeterministic) {
  const std::vector<std::string> base{"fit", kEnso, "--knots", "30", "--quiet"};
  auto a = base, b = base;
  a.insert(a.end(), {"--model-out", path("a.json"), "--curve-out", path("a.csv")});
  b.insert(b.end(), {"--model-out", path("b.json"), "--curve-out", path("b.csv")});
  ASSERT_EQ(invoke(a).code, 0);
  ASSERT_EQ(invoke(b).code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, FitOnSingleRowIsUsageError) {
  std::ofstream(path("one.csv")) << "x,y\n1,2\n";
  const auto r = invoke({"fit", path("one.csv"), "--model-out", path("m.json"), "--curve-out", path("c.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("DegenerateDomain"), std::string::npos);
}

TEST_F(Cli, MissingColumnIsUsageError) {
  const auto r = invoke({"fit", kEnso, "--y-col", "temperature", "--model-out", path("m.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("MissingColumn"), std::string::npos);
}

TEST_F(Cli, RescaledFitReportsOriginalUnits) {
  ASSERT_EQ(invoke({"fit", kEnso, "--rescale", "unit", "--model-out", path("m.json"), "--curve-out",
                    path("c.csv"), "-q"})
                .code,
            0);
  const auto z = column(slurp(path("c.csv")), 0);
  EXPECT_DOUBLE_EQ(z.front(), 1.0);
  EXPECT_DOUBLE_EQ(z.back(), 168.0);
  const auto r = invoke({"predict", kEnso, "--rescale", "unit", "--at", "1,84.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out).size(), 3u);
}

TEST_F(Cli, PredictMatchesCurve) {
  const auto r = invoke({"predict", kEnso, "--knots", "12", "--lambda", "1", "--at", "1,168"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(invoke({"fit", kEnso, "--knots", "12", "--lambda", "1", "--model-out", path("m.json"), "--curve-out",
                    path("c.csv"), "-q"})
                .code,
            0);
  const auto est = column(r.out, 1);
  const auto curve = column(slurp(path("c.csv")), 1);
  EXPECT_DOUBLE_EQ(est.front(), curve.front());
  EXPECT_DOUBLE_EQ(est.back(), curve.back());
}

TEST_F(Cli, BonferroniWiderThanPointwise) {
  ASSERT_EQ(invoke({"band", kEnso, "--kind", "bonferroni", "--alpha", "0.05", "--points", "50", "--out",
                    path("bonf.csv"), "-q"})
                .code,
            0);
  ASSERT_EQ(invoke({"band", kEnso, "--kind", "pointwise", "--alpha", "0.05", "--points", "50", "--out",
                    path("pw.csv"), "-q"})
                .code,
            0);
  const auto bonf = slurp(path("bonf.csv"));
  EXPECT_EQ(lines_of(bonf).front(), "z,estimate,lower,upper,half_width,kind,alpha");
  const auto wb = column(bonf, 4);
  const auto wp = column(slurp(path("pw.csv")), 4);
  ASSERT_EQ(wb.size(), 50u);
  for (std::size_t k = 0; k < wb.size(); ++k) EXPECT_GE(wb[k], wp[k]);
}

TEST_F(Cli, SimulatedBandReproducible) {
  const std::vector<std::string> base{"band", kEnso, "--kind", "simulated", "--draws", "10000", "--seed", "7", "-q"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--out", path("a.csv")});
  b.insert(b.end(), {"--out", path("b.csv")});
  c.insert(c.end(), {"--out", path("c.csv")});
  c[7] = "8";
  ASSERT_EQ(invoke(a).code, 0);
  ASSERT_EQ(invoke(b).code, 0);
  ASSERT_EQ(invoke(c).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(Cli, BandOutOfDomainPoint) {
  std::ofstream(path("pts.csv")) << "z\n10\n20\n500\n";
  const auto r = invoke({"band", kEnso, "--points-from", path("pts.csv"), "--out", path("b.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("OutOfDomain"), std::string::npos);
  EXPECT_NE(r.err.find("index 2"), std::string::npos);
}

TEST_F(Cli, GridPresetRowCount) {
  const auto r = invoke({"grid", kEnso, "--preset", "pspline-table4", "--out-prefix", path("ps")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(slurp(path("ps.csv"))).size(), 43u);
  const auto report = nlohmann::json::parse(slurp(path("ps.json")));
  EXPECT_EQ(report["rows"].size(), 42u);
  EXPECT_EQ(lines_of(slurp(path("ps.md"))).size(), 44u);
  const auto manifest = nlohmann::json::parse(slurp(path("ps.manifest.json")));
  EXPECT_EQ(manifest["preset"], "pspline-table4");
  EXPECT_EQ(manifest["master_seed"], 42);
}

TEST_F(Cli, GridEmptyDegreesIsUsageError) {
  const auto r = invoke({"grid", kEnso, "--family", "bspline", "--knots", "3", "--out-prefix", path("g")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InvalidArgument"), std::string::npos);
}

TEST_F(Cli, GridSeedChangesOnlyTheSplit) {
  const std::vector<std::string> base{"grid",       kEnso,         "--family", "bspline", "--degrees",
                                      "2",          "--knots",     "5,10",     "--formats", "csv",
                                      "--no-manifest", "-q"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--seed", "1", "--out-prefix", path("a")});
  b.insert(b.end(), {"--seed", "2", "--out-prefix", path("b")});
  c.insert(c.end(), {"--seed", "1", "--out-prefix", path("c")});
  ASSERT_EQ(invoke(a).code, 0);
  ASSERT_EQ(invoke(b).code, 0);
  ASSERT_EQ(invoke(c).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("c.csv")));
  const auto ra = lines_of(slurp(path("a.csv")));
  const auto rb = lines_of(slurp(path("b.csv")));
  ASSERT_EQ(ra.size(), rb.size());
  EXPECT_EQ(ra[0], rb[0]);
  for (std::size_t k = 1; k < ra.size(); ++k) {
    // Same cell coordinates, different criteria.
    EXPECT_EQ(ra[k].substr(0, ra[k].find(",,")), rb[k].substr(0, rb[k].find(",,")));
    EXPECT_NE(ra[k], rb[k]);
  }
}

TEST_F(Cli, SeedFromEnvironment) {
  ::setenv("SPLINEFIT_SEED", "1", 1);
  EXPECT_EQ(splinefit::cli::default_seed(), 1u);
  const std::vector<std::string> base{"grid", kEnso, "--family", "bspline", "--degrees", "1", "--knots", "4",
                                      "--formats", "csv", "--no-manifest", "-q"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out-prefix", path("env")});
  ASSERT_EQ(invoke(a).code, 0);
  ::unsetenv("SPLINEFIT_SEED");
  EXPECT_EQ(splinefit::cli::default_seed(), 42u);
  b.insert(b.end(), {"--seed", "1", "--out-prefix", path("flag")});
  ASSERT_EQ(invoke(b).code, 0);
  EXPECT_EQ(slurp(path("env.csv")), slurp(path("flag.csv")));
}

TEST_F(Cli, DiagnoseWindowOnePassthrough) {
  ASSERT_EQ(invoke({"diagnose", kEnso, "--window", "1", "--out", path("r.csv")}).code, 0);
  const auto text = slurp(path("r.csv"));
  EXPECT_EQ(lines_of(text).front(), "fitted,residual,smoothed");
  const auto fitted = column(text, 0);
  EXPECT_EQ(column(text, 1), column(text, 2));
  EXPECT_EQ(fitted.size(), 168u);
  EXPECT_TRUE(std::is_sorted(fitted.begin(), fitted.end()));
}

TEST_F(Cli, DiagnoseEvenWindowIsUsageError) {
  EXPECT_EQ(invoke({"diagnose", kEnso, "--window", "4", "--out", path("r.csv")}).code, 2);
}

TEST(CliBinary, ExitCodesFromProcess) {
  const std::string tool = SPLINEFIT_TOOL_PATH;
  EXPECT_EQ(std::system((tool + " --help > /dev/null").c_str()), 0);
  const int usage = std::system((tool + " fit /nonexistent.csv 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(usage));
  EXPECT_EQ(WEXITSTATUS(usage), 2);
}
