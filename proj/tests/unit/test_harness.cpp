#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "declab/errors.hpp"
#include "declab/harness.hpp"

using namespace declab;
using nlohmann::json;

namespace {

json lap_config() {
  return {{"experiment", "lap"}, {"kind", "lapnumber"}, {"map", "doubling"}, {"alpha", 0.5},
          {"n", json::array({1000, 4000})}, {"seeds", 5}, {"seed", 3}};
}

std::string field_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

std::filesystem::path scratch_dir() {
  auto p = std::filesystem::temp_directory_path() / ("declab_harness_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(ParseConfig, AcceptsMinimalLapnumber) {
  const ExperimentConfig c = parse_config(lap_config());
  EXPECT_EQ(c.kind, ExperimentKind::Lapnumber);
  EXPECT_EQ(c.n, (std::vector<std::size_t>{1000, 4000}));
  EXPECT_EQ(c.seeds, 5u);
  EXPECT_FALSE(c.timing);
  EXPECT_EQ(c.return_cap, 10'000'000u);
}

TEST(ParseConfig, ErrorsNameTheField) {
  auto with = [](const char* key, json v) {
    json j = lap_config();
    j[key] = std::move(v);
    return j;
  };
  auto without = [](const char* key) {
    json j = lap_config();
    j.erase(key);
    return j;
  };
  EXPECT_EQ(field_of(with("bogus", 1)), "/bogus");
  EXPECT_EQ(field_of(with("params", {{"quantile", 0.5}})), "/params/quantile");
  EXPECT_EQ(field_of(without("map")), "/map");
  EXPECT_EQ(field_of(without("experiment")), "/experiment");
  EXPECT_EQ(field_of(with("kind", "nope")), "/kind");
  EXPECT_EQ(field_of(with("map", "baker")), "/map");
  EXPECT_EQ(field_of(with("alpha", 1.5)), "/alpha");
  EXPECT_EQ(field_of(with("n", json::array({10, 20, 10}))), "/n/2");
  EXPECT_EQ(field_of(with("n", json::array({10, -1}))), "/n/1");
  EXPECT_EQ(field_of(with("samples", 10)), "/samples");
  EXPECT_EQ(field_of(with("seeds", 0)), "/seeds");
  EXPECT_EQ(field_of(with("timing", 1)), "/timing");
  EXPECT_EQ(field_of(with("threads", "4")), "/threads");
  EXPECT_EQ(field_of(with("return_cap", 0)), "/return_cap");
  EXPECT_EQ(field_of(json::array()), "");
}

TEST(ParseConfig, KindSpecificRules) {
  json ks{{"experiment", "ks"}, {"kind", "marginal-ks"}, {"map", "lsv"}, {"alpha", 1.5}, {"n", 100}, {"samples", 10}};
  EXPECT_EQ(field_of(ks), "/map");
  json chf{{"experiment", "c"}, {"kind", "chf-check"}, {"alpha", 1.0}, {"samples", 10}, {"params", {{"nu", {{"atoms", json::array()}}}}}};
  EXPECT_EQ(field_of(chf), "/alpha");
  chf["alpha"] = 0.5;
  chf["params"] = json::object();
  EXPECT_EQ(field_of(chf), "/params/nu");
  chf["params"] = {{"nu", {{"atoms", {{{"omega", {1.0}}, {"weight", 1.0}}}}}}};
  chf["return_cap"] = 5;
  EXPECT_EQ(field_of(chf), "/return_cap");
  chf.erase("return_cap");
  chf["map"] = "doubling";
  EXPECT_EQ(field_of(chf), "/map");
  json shape{{"experiment", "s"}, {"kind", "excursion-shape"}, {"map", "tripling"}, {"alpha", 0.5}, {"samples", 10},
             {"params", {{"r_min", 30}, {"r_max", 20}}}};
  EXPECT_EQ(field_of(shape), "/params/r_max");
  json over{{"experiment", "o"}, {"kind", "overshoot"}, {"map", "double-lsv"}, {"alpha", 1.5}, {"n", 100}};
  EXPECT_EQ(field_of(over), "/map");
  json prof{{"experiment", "p"}, {"kind", "profile-classify"},
            {"params", {{"trace_sets", {{{"name", "x"}, {"file", "does/not/exist.csv"}}}}}}};
  EXPECT_EQ(field_of(prof), "/params/trace_sets/0/file");
}

TEST(MedianCi, OrderStatisticRanks) {
  std::vector<double> nine;
  for (int k = 9; k >= 1; --k) nine.push_back(k);
  const MedianCi a = median_ci(nine);
  EXPECT_EQ(a.median, 5.0);
  EXPECT_EQ(a.lo, 1.0);
  EXPECT_EQ(a.hi, 9.0);
  std::vector<double> hundred;
  for (int k = 1; k <= 100; ++k) hundred.push_back(k);
  const MedianCi b = median_ci(hundred);
  EXPECT_EQ(b.median, 50.5);
  EXPECT_EQ(b.lo, 40.0);  // rank floor(50 - 9.8)
  EXPECT_EQ(b.hi, 61.0);  // rank ceil(51 + 9.8)
  EXPECT_THROW(median_ci({}), DomainError);
}

TEST(RunExperiment, LapnumberIsDeterministicAcrossRunsAndThreads) {
  ExperimentConfig c = parse_config(lap_config());
  const RunResult a = run_experiment(c);
  const RunResult b = run_experiment(c);
  c.threads = 3;
  const RunResult t = run_experiment(c);
  EXPECT_EQ(to_csv(a), to_csv(b));
  EXPECT_EQ(to_csv(a), to_csv(t));
  EXPECT_EQ(to_csv(a).substr(0, to_csv(a).find('\n')), "experiment,kind,n,seed,statistic,value,ci_lo,ci_hi,runtime_s");

  // 2 statistics x 2 n x 5 seeds, plus 4 aggregates.
  EXPECT_EQ(a.records.size(), 24u);
  const auto agg = a.aggregate("lap_ratio", 4000);
  ASSERT_TRUE(agg);
  EXPECT_EQ(agg->seed, -1);
  EXPECT_NEAR(agg->value, 0.5, 0.05);
  EXPECT_LE(agg->ci_lo, agg->value);
  EXPECT_GE(agg->ci_hi, agg->value);
  EXPECT_FALSE(a.aggregate("lap_ratio", 7));
  std::set<std::int64_t> seeds;
  for (const auto& r : a.records) seeds.insert(r.seed);
  EXPECT_EQ(seeds, (std::set<std::int64_t>{-1, 3, 4, 5, 6, 7}));
}

TEST(RunExperiment, DisjointSeedRangesDiffer) {
  ExperimentConfig c = parse_config(lap_config());
  const RunResult a = run_experiment(c);
  c.seed = 100;
  const RunResult b = run_experiment(c);
  // Lap ratios are discrete, so compare the whole per-seed vector.
  std::vector<double> va, vb;
  for (const auto& r : a.records) va.push_back(r.value);
  for (const auto& r : b.records) vb.push_back(r.value);
  EXPECT_NE(va, vb);
}

TEST(RunExperiment, WorkerFailureReportsCompletedSeeds) {
  // A return cap of 2 makes most doubling orbits fail within a few excursions.
  json j{{"experiment", "cap"}, {"kind", "hypothesis-trend"}, {"map", "doubling"}, {"alpha", 0.5},
         {"n", 3}, {"seeds", 12}, {"return_cap", 2}};
  try {
    run_experiment(parse_config(j));
    FAIL() << "expected a partial result";
  } catch (const PartialResultError& e) {
    const auto& done = e.completed_seeds();
    EXPECT_GT(done.size(), 0u);
    EXPECT_LT(done.size(), 12u);
    for (const auto& r : e.partial().records) EXPECT_NE(std::find(done.begin(), done.end(), r.seed), done.end());
    EXPECT_NE(std::string(e.what()).find("completed seeds"), std::string::npos);
  }
}

TEST(RunExperiment, ProfileClassifyOnShippedTraces) {
  json j{{"experiment", "cusp-modes"}, {"kind", "profile-classify"}, {"base_dir", DECLAB_CONFIG_DIR},
         {"params", {{"trace_sets", {{{"name", "a"}, {"file", "cusp/a_m1.csv"}},
                                     {{"name", "b"}, {"file", "cusp/b_m2.csv"}},
                                     {{"name", "c"}, {"file", "cusp/c_none.csv"}},
                                     {{"name", "flat"}, {"dim", 1}, {"theta", {0.0, 3.141592653589793}},
                                      {"v_plus", {1.0, 1.0}}, {"v_minus", {1.0, 1.0}}}}}}}};
  const RunResult r = run_experiment(parse_config(j));
  EXPECT_EQ(r.aggregate("mode:a")->value, 1.0);
  EXPECT_EQ(r.aggregate("mode:b")->value, 2.0);
  EXPECT_EQ(r.aggregate("mode:c")->value, 3.0);
  EXPECT_EQ(r.aggregate("mode:flat")->value, 1.0);
}

TEST(Reports, EmptyResultIsAnError) {
  EXPECT_THROW(render_report(RunResult{}, ReportFormat::Csv), DomainError);
  EXPECT_THROW(emit_report(RunResult{}, ReportFormat::Json, scratch_dir() / "x.csv"), DomainError);
}

TEST(Reports, IoFailureCarriesSystemMessage) {
  RunResult r;
  r.records.push_back({"e", "lapnumber", 1, 0, "s", 1.0, 1.0, 1.0, 0.0});
  try {
    emit_report(r, ReportFormat::Csv, "/nonexistent-dir/out.csv");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("No such file"), std::string::npos);
  }
}

TEST(Reports, RecordRoundTrips) {
  RunResult r;
  r.records.push_back({"with,comma", "overshoot", 1000000, -1, "span \"ratio\"", 1.0 / 3.0, 0.1, 0.9, 0.0});
  r.records.push_back({"plain", "lapnumber", 0, 7, "lap_ratio", 0.49999999999999994, 5e-324, 1e308, 1.25});
  EXPECT_EQ(result_from_json(json::parse(render_report(r, ReportFormat::Json))).records, r.records);

  const auto dir = scratch_dir();
  write_results(r, dir / "results.bin");
  EXPECT_EQ(read_results(dir / "results.bin").records, r.records);

  const std::string csv = render_report(r, ReportFormat::Csv);
  EXPECT_NE(csv.find("\"with,comma\""), std::string::npos);
  EXPECT_NE(csv.find("\"span \"\"ratio\"\"\""), std::string::npos);
  EXPECT_NE(csv.find("0.49999999999999994"), std::string::npos);
  EXPECT_THROW(read_results(dir / "missing.bin"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(LoadConfig, RelativeFilesResolveAgainstConfigDirectory) {
  const auto dir = scratch_dir();
  std::filesystem::create_directories(dir / "traces");
  std::filesystem::copy_file(std::string(DECLAB_CONFIG_DIR) + "/cusp/a_m1.csv", dir / "traces/a.csv",
                             std::filesystem::copy_options::overwrite_existing);
  {
    std::ofstream out(dir / "cfg.json");
    out << R"({"experiment": "x", "kind": "profile-classify",
              "params": {"trace_sets": [{"name": "a", "file": "traces/a.csv"}]}})";
  }
  const ExperimentConfig c = load_config(dir / "cfg.json");
  EXPECT_EQ(std::filesystem::path(c.base_dir), dir);
  EXPECT_EQ(run_experiment(c).aggregate("mode:a")->value, 1.0);
  {
    std::ofstream out(dir / "bad.json");
    out << "{ not json";
  }
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  std::filesystem::remove_all(dir);
}
