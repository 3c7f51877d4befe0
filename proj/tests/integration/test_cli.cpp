#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("declab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  Outcome run(const std::string& args) const {
    const fs::path err = path("stderr.txt");
    const std::string cmd = "cd '" + dir_.string() + "' && '" DECLAB_CLI "' " + args + " 2> '" + err.string() + "'";
    Outcome r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read("stderr.txt");
    return r;
  }

  fs::path dir_;
};

const char* kJumpA = R"({"dim":1,"u0":[0],"kind":"step","points":[{"t":0.5,"v":[1]}]})";
const char* kJumpB = R"({"dim":1,"u0":[0],"kind":"step","points":[{"t":0.2,"v":[0.9]}]})";

}  // namespace

TEST_F(Cli, DistanceMetrics) {
  write("a.json", kJumpA);
  write("b.json", kJumpB);
  const Outcome d = run("distance --metric dtilde a.json b.json");
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_NEAR(json::parse(d.out).at("value").get<double>(), 0.1, 1e-15);
  const Outcome j = run("distance --metric j1 a.json b.json");
  ASSERT_EQ(j.code, 0) << j.err;
  const json jj = json::parse(j.out);
  EXPECT_NEAR(jj.at("value").get<double>(), 0.3, 1e-15);
  EXPECT_NEAR(jj.at("upper").get<double>(), 0.6, 1e-15);  // bracket (m, 2m)
  const Outcome h = run("distance --metric hausdorff --delta 0.001 a.json a.json");
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_LE(json::parse(h.out).at("value").get<double>(), 5e-4);
}

TEST_F(Cli, DistanceRejectsPolylineForDTilde) {
  write("a.json", kJumpA);
  write("p.json", R"({"dim":1,"u0":[0],"kind":"polyline","points":[{"t":0,"v":[0]},{"t":1,"v":[1]}]})");
  const Outcome r = run("distance --metric dtilde a.json p.json");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("step path"), std::string::npos);
}

TEST_F(Cli, SimulateIsDeterministic) {
  const Outcome a = run("simulate --map tripling --alpha 0.5 --n 50 --samples 3 --seed 4 --out w1.jsonl");
  const Outcome b = run("simulate --map tripling --alpha 0.5 --n 50 --samples 3 --seed 4 --out w2.jsonl");
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(read("w1.jsonl"), read("w2.jsonl"));
  std::istringstream lines(read("w1.jsonl"));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json p = json::parse(line);
    EXPECT_EQ(p.at("kind"), "step");
    EXPECT_EQ(p.at("points").size(), 50u);
    ++count;
  }
  EXPECT_EQ(count, 3);
}

TEST_F(Cli, InduceCsv) {
  const Outcome r = run("induce --map doubling --alpha 0.5 --samples 20 --seed 1");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "x0,R,V_1");
  int rows = 0;
  while (std::getline(lines, line)) {
    const double x0 = std::stod(line.substr(0, line.find(',')));
    EXPECT_GE(x0, 0.5);
    ++rows;
  }
  EXPECT_EQ(rows, 20);
}

TEST_F(Cli, StableChfMatchesClosedForm) {
  write("nu.json", R"({"atoms":[{"omega":[1],"weight":1}]})");
  write("grid.csv", "s_1\n0.7\n-0.3\n");
  const Outcome r = run("stable chf --alpha 0.5 --nu nu.json --s-grid grid.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  const double sigma = std::pow(std::cos(std::numbers::pi / 4) * std::tgamma(0.5), 2.0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "s_1,re,im");
  for (double s : {0.7, -0.3}) {
    ASSERT_TRUE(std::getline(lines, line));
    double ss, re, im;
    char c1, c2;
    std::istringstream(line) >> ss >> c1 >> re >> c2 >> im;
    const double mag = std::sqrt(sigma * std::abs(s));
    EXPECT_NEAR(re, std::exp(-mag) * std::cos(mag), 1e-13);
    EXPECT_NEAR(im, std::copysign(std::exp(-mag) * std::sin(mag), s), 1e-13);
  }
}

TEST_F(Cli, SampleDecoratePsiPipeline) {
  write("nu.json", R"({"atoms":[{"omega":[1],"weight":1}]})");
  write("profiles.json", R"([{"omega":[1],"path":{"dim":1,"u0":[0],"kind":"step","points":[{"t":0.5,"v":[1.1111111111111112]},{"t":0.75,"v":[1]}]}}])");
  ASSERT_EQ(run("stable sample --alpha 0.5 --nu nu.json --paths 2 --seed 3 --truncation 50 --grid 8 --out L.jsonl").code, 0);
  const Outcome d = run("decorate --profiles profiles.json L.jsonl --out x.json");
  ASSERT_EQ(d.code, 0) << d.err;
  const json x = json::parse(read("x.json"));
  EXPECT_FALSE(x.at("excursions").empty());
  const Outcome p = run("psi x.json");
  ASSERT_EQ(p.code, 0) << p.err;
  const json psi = json::parse(p.out);
  // The running maximum never decreases.
  double last = psi.at("u0")[0].get<double>();
  for (const auto& pt : psi.at("points")) {
    EXPECT_GE(pt.at("v")[0].get<double>(), last);
    last = pt.at("v")[0].get<double>();
  }
}

TEST_F(Cli, ProfileCusp) {
  const Outcome r = run("profile-cusp --beta 3 --traces '" DECLAB_CONFIG_DIR "/cusp/b_m2.csv' --out p.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const json p = json::parse(read("p.json"));
  EXPECT_EQ(p.at("mode"), "M2");
  EXPECT_DOUBLE_EQ(p.at("alpha").get<double>(), 1.5);
}

TEST_F(Cli, ExperimentRunAndReport) {
  write("cfg.json", R"({"experiment": "lap", "kind": "lapnumber", "map": "doubling", "alpha": 0.5,
                        "n": [1000], "seeds": 4, "output": "results.bin", "csv": "results.csv"})");
  const Outcome r = run("experiment run cfg.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const Outcome rep = run("experiment report results.bin --format csv");
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_EQ(rep.out, read("results.csv"));
  const Outcome again = run("experiment run cfg.json");
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(rep.out, read("results.csv"));
  const Outcome js = run("experiment report results.bin --format json --out r.json");
  ASSERT_EQ(js.code, 0) << js.err;
  EXPECT_EQ(json::parse(read("r.json")).at("records").size(), 10u);
}

TEST_F(Cli, ExperimentPrintsCsvWithoutOutputs) {
  write("cfg.json", R"({"experiment": "lap", "kind": "lapnumber", "map": "tripling", "alpha": 0.5, "n": 100})");
  const Outcome r = run("experiment run cfg.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("experiment,kind,n,seed,statistic,value,ci_lo,ci_hi,runtime_s\n", 0), 0u);
}

TEST_F(Cli, ExitCodes) {
  write("bad.json", R"({"experiment": "x", "kind": "lapnumber", "map": "doubling", "alpha": 0.5, "n": 10, "sedes": 3})");
  const Outcome c = run("experiment run bad.json");
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.err.find("/sedes"), std::string::npos);
  write("cap.json", R"({"experiment": "x", "kind": "hypothesis-trend", "map": "doubling", "alpha": 0.5,
                        "n": 3, "seeds": 12, "return_cap": 2})");
  const Outcome p = run("experiment run cap.json");
  EXPECT_EQ(p.code, 3);
  EXPECT_NE(p.err.find("completed seeds"), std::string::npos);
  write("empty.bin", "");
  EXPECT_EQ(run("experiment report empty.bin").code, 1);
  EXPECT_NE(run("distance --metric dtilde missing.json missing.json").code, 0);
}
