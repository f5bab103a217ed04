#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "esterr/cli_runner.hpp"
#include "esterr/csv.hpp"

using namespace esterr;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("esterr_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string parse_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

json scenario(json extra) {
  json s = {{"name", "s"}, {"prior", "binary_sym"}, {"noise", "gaussian"}, {"sigma", 0.5},
            {"job", "curve"},  {"output", "s"}};
  s.update(extra);
  return s;
}

json doc(std::vector<json> scenarios) { return {{"version", 1}, {"scenarios", scenarios}}; }

}  // namespace

TEST(Csv, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  for (double v : {1.0 / 3.0, 6.02214076e23, 5e-324, -0.0}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(Csv, TableText) {
  CsvTable t({"a", "b"});
  t.add_row({1.5, std::string("x")});
  t.add_row({std::int64_t{-3}, std::uint64_t{7}});
  EXPECT_EQ(t.str(), "a,b\n1.5,x\n-3,7\n");
  EXPECT_THROW(t.add_row({1.0}), Error);
}

TEST(Config, EmptyScenarioList) {
  EXPECT_TRUE(parse_config_text(R"({"version": 1, "scenarios": []})").scenarios.empty());
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(parse_error("{").find("parse"), std::string::npos);
  EXPECT_NE(parse_error(R"({"version": 2, "scenarios": []})").find("version"), std::string::npos);
  EXPECT_NE(parse_error(doc({scenario({{"sigma", -1.0}})}).dump()).find("scenarios[0].sigma"),
            std::string::npos);
  EXPECT_NE(parse_error(doc({scenario({{"job", "plot"}})}).dump()).find("scenarios[0].job"),
            std::string::npos);
  EXPECT_NE(parse_error(doc({scenario({{"noise", "pink"}})}).dump()).find("scenarios[0].noise"),
            std::string::npos);
  EXPECT_NE(parse_error(doc({scenario({{"colour", 1}})}).dump()).find("scenarios[0].colour"),
            std::string::npos);
  EXPECT_NE(parse_error(doc({scenario({{"prior", {{"type", "binary"}, {"p", 1.5}}}})}).dump())
                .find("scenarios[0].prior"),
            std::string::npos);
  EXPECT_NE(parse_error(doc({scenario(json::object()), scenario({{"output", "t"}})}).dump()).find("name"),
            std::string::npos);
}

TEST(Config, JobKindsValidatedAgainstPrior) {
  // Density jobs need a strictly increasing posterior mean.
  EXPECT_NE(parse_error(doc({scenario({{"prior", {{"type", "point_mass"}, {"location", 0.0}}},
                                       {"job", "density"}})})
                            .dump()),
            "");
  EXPECT_NE(parse_error(doc({scenario({{"job", "decomposition"},
                                       {"sigma_grid", {{"from", 1.0}, {"to", 0.1}, {"n", 4}}}})})
                            .dump()),
            "");
  EXPECT_NE(parse_error(doc({scenario({{"job", "oracle"}, {"n", 10}})}).dump()), "");
  EXPECT_NE(parse_error(doc({scenario({{"job", "mmse_dimension"}, {"noise", "cauchy"}})}).dump()),
            "");
}

TEST(Config, InlinePriorsAndNoise) {
  json s = scenario(
      {{"prior",
        {{"type", "mixture"},
         {"alpha", 0.25},
         {"first", {{"type", "discrete"}, {"atoms", {{-1.0, 0.5}, {1.0, 0.5}}}}},
         {"second", {{"type", "uniform"}, {"a", 5.0}, {"b", 6.0}}}}},
       {"noise", {{"name", "laplace"}, {"location", 0.0}, {"scale", 2.0}}},
       {"sigmas", {0.5, 1.0}}});
  s.erase("sigma");
  const ExperimentConfig c = parse_config(doc({s}));
  ASSERT_EQ(c.scenarios.size(), 1u);
  EXPECT_EQ(c.scenarios[0].prior.kind(), PriorSpec::Kind::Mixture);
  EXPECT_EQ(c.scenarios[0].sigmas, (std::vector<double>{0.5, 1.0}));
  EXPECT_NEAR(c.scenarios[0].noise.variance(), 8.0, 1e-12);
}

TEST(Config, MissingFileIsIoError) {
  std::ostringstream log;
  EXPECT_EQ(run_config_file("/nonexistent/esterr.json", {}, log), 2);
}

TEST(Run, EmptyConfigPasses) {
  const fs::path out = fresh_dir("empty");
  const RunResult r = run(ExperimentConfig{}, {out, 1, std::nullopt});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.summary["scenarios"].empty());
  EXPECT_TRUE(fs::exists(out / "summary.json"));
}

TEST(Run, NormalizedCurvesAndSummary) {
  const fs::path out = fresh_dir("fig");
  json fig = scenario({{"name", "fig"},
                       {"job", "normalized_density"},
                       {"sigmas", {0.3, 0.5, 1.0}},
                       {"grid", {{"from", -7.0}, {"to", 7.0}, {"n", 281}}},
                       {"output", "fig"}});
  fig.erase("sigma");
  const json d = doc({fig,
                      scenario({{"name", "gone"},
                                {"prior", "binary_sym"},
                                {"noise", "student_t3"},
                                {"sigma", 0.3},
                                {"job", "density"},
                                {"output", "gone"}})});
  const RunResult r = run(parse_config(d), {out, 2, std::nullopt});
  ASSERT_EQ(r.scenarios.size(), 2u);
  EXPECT_EQ(r.scenarios[0].status, "pass");
  // Heavy-tailed noise breaks invertibility: the scenario errors, the run continues.
  EXPECT_EQ(r.scenarios[1].status, "error");
  EXPECT_EQ(r.exit_code, 1);
  for (const char* s : {"fig_sigma0.3.csv", "fig_sigma0.5.csv", "fig_sigma1.csv"}) {
    const std::string text = slurp(out / s);
    EXPECT_EQ(text.rfind("w,f_E_sigma\n", 0), 0u) << s;
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 282);
  }
  const json summary = json::parse(slurp(out / "summary.json"));
  std::set<std::string> names;
  for (const json& s : summary["scenarios"]) {
    names.insert(s["name"].get<std::string>());
    const std::string status = s["status"];
    EXPECT_TRUE(status == "pass" || status == "fail" || status == "error");
  }
  EXPECT_EQ(names, (std::set<std::string>{"fig", "gone"}));
}

TEST(Run, SweepOverLimitRows) {
  const fs::path out = fresh_dir("sweep");
  std::vector<json> s;
  const std::vector<std::pair<std::string, std::string>> rows{{"binary_sym", "gaussian"},
                                                              {"beta22", "laplace"},
                                                              {"uniform01", "student_t3"},
                                                              {"mix_atom_uniform", "gaussian"}};
  for (const auto& [prior, noise] : rows) {
    s.push_back({{"name", prior},
                 {"job", "sweep"},
                 {"prior", prior},
                 {"noise", noise},
                 {"sigma_grid", {{"from", 1.0}, {"to", 1e-3}, {"n", 40}}},
                 {"paths", 8},
                 {"output", prior}});
  }
  const RunResult r = run(parse_config(doc(s)), {out, 1, std::nullopt});
  ASSERT_EQ(r.summary["scenarios"].size(), 4u);
  for (const json& e : r.summary["scenarios"]) EXPECT_EQ(e["status"], "pass") << e.dump();
  EXPECT_EQ(r.exit_code, 0);
}

TEST(Run, ToleranceViolationExitsOne) {
  const fs::path out = fresh_dir("tol");
  const json d = doc({{{"name", "mix"},
                       {"job", "decomposition"},
                       {"prior", "mix_nested_uniform"},
                       {"noise", "gaussian"},
                       {"sigma_grid", {{"from", 1.0}, {"to", 0.5}, {"n", 3}}},
                       {"paths", 4},
                       {"tolerance", 1e-300},
                       {"output", "mix"}}});
  std::ostringstream log;
  const fs::path cfg = out.string() + ".json";
  write_text_file(cfg, d.dump());
  EXPECT_EQ(run_config_file(cfg, {out, 1, std::nullopt}, log), 1);
}

TEST(Run, IdempotentAndThreadIndependent) {
  json d = doc({scenario({{"name", "curve"}, {"output", "curve"}}),
                {{"name", "oracle"},
                 {"job", "oracle"},
                 {"prior", "binary_sym"},
                 {"noise", "gaussian"},
                 {"sigma", 0.5},
                 {"n", 20000},
                 {"seed", 3},
                 {"tolerance", 0.05},
                 {"output", "oracle"}}});
  const ExperimentConfig c = parse_config(d);
  const fs::path a = fresh_dir("idem_a");
  const fs::path b = fresh_dir("idem_b");
  run(c, {a, 1, std::nullopt});
  const std::string first = slurp(a / "oracle.csv");
  run(c, {a, 1, std::nullopt});
  run(c, {b, 3, std::nullopt});
  EXPECT_EQ(slurp(a / "oracle.csv"), first);
  for (const char* f : {"curve.csv", "oracle.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const fs::path c2 = fresh_dir("idem_seed");
  run(c, {c2, 1, std::uint64_t{99}});
  EXPECT_NE(slurp(c2 / "oracle.csv"), first);
}

TEST(Run, SelftestConfigParses) {
  const ExperimentConfig c = parse_config(selftest_config());
  EXPECT_FALSE(c.scenarios.empty());
}

TEST(Json, NonFiniteNumbers) {
  EXPECT_EQ(json_number(1.5), json(1.5));
  EXPECT_EQ(json_number(std::numeric_limits<double>::infinity()), json("inf"));
  EXPECT_EQ(json_number(std::nan("")), json("nan"));
}
