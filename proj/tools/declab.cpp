// declab command-line interface.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "declab/cusp.hpp"
#include "declab/dynamics.hpp"
#include "declab/errors.hpp"
#include "declab/fprime.hpp"
#include "declab/harness.hpp"
#include "declab/json_io.hpp"
#include "declab/metrics.hpp"

using namespace declab;

namespace {

json read_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(file + ": " + e.what());
  }
}

// Output stream: the named file, or stdout for "" and "-".
class Sink {
 public:
  explicit Sink(const std::string& file) {
    if (!file.empty() && file != "-") {
      file_.open(file, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + file + " for writing");
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

bool is_decorated(const json& j) { return j.is_object() && j.contains("excursions"); }

StepPath as_step(const Path& p, const std::string& what) {
  if (!is_step(p)) throw DomainError(what + " must be a step path");
  return std::get<StepPath>(p);
}

json distance(const std::string& metric, double delta, const json& a, const json& b) {
  if (metric == "dtilde") {
    return to_json(d_tildeD(as_step(path_from_json(a), "a"), as_step(path_from_json(b), "b")));
  }
  if (metric == "hausdorff") {
    if (is_decorated(a) || is_decorated(b)) return to_json(d_E(decorated_from_json(a), decorated_from_json(b), delta));
    return to_json(hausdorff(completed_graph(path_from_json(a), Completion::Box),
                             completed_graph(path_from_json(b), Completion::Box), delta));
  }
  if (metric == "m2") return to_json(d_M2(path_from_json(a), path_from_json(b), delta));
  if (metric == "fprime") return to_json(d_Fprime(decorated_from_json(a), decorated_from_json(b), delta, delta));
  if (metric == "j1") {
    const auto [lo, hi] = d_J1_bracket(as_step(path_from_json(a), "a"), as_step(path_from_json(b), "b"));
    return {{"value", lo}, {"error_bound", hi - lo}, {"method", to_string(Method::Bracket)}, {"upper", hi}};
  }
  throw DomainError("unknown metric '" + metric + "'");
}

std::vector<Vec> read_grid_csv(const std::string& file, std::size_t d) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::vector<Vec> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    Vec s;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        s.push_back(std::stod(cell));
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (row == 1) continue;  // header
      throw DomainError(file + ": row " + std::to_string(row) + " is not numeric");
    }
    if (s.size() != d) throw DomainError(file + ": row " + std::to_string(row) + " has " + std::to_string(s.size()) + " columns, expected " + std::to_string(d));
    out.push_back(std::move(s));
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decorated Levy process laboratory"};
  app.require_subcommand(1);

  // distance
  auto* dist = app.add_subcommand("distance", "Distance between two paths (JSON)");
  std::string metric = "dtilde", file_a, file_b;
  double delta = 1e-3;
  dist->add_option("--metric", metric, "dtilde | hausdorff | m2 | j1 | fprime")->check(CLI::IsMember({"dtilde", "hausdorff", "m2", "j1", "fprime"}));
  dist->add_option("--delta", delta, "Sampling resolution for Hausdorff-based metrics")->check(CLI::PositiveNumber);
  dist->add_option("a", file_a)->required()->check(CLI::ExistingFile);
  dist->add_option("b", file_b)->required()->check(CLI::ExistingFile);

  // decorate / psi
  auto* deco = app.add_subcommand("decorate", "Attach profiles to a Levy path");
  std::string profiles_file, levy_file, out_file;
  deco->add_option("--profiles", profiles_file)->required()->check(CLI::ExistingFile);
  deco->add_option("levy", levy_file, "Levy path JSON (or first line of a .jsonl)")->required()->check(CLI::ExistingFile);
  deco->add_option("--out", out_file);
  auto* psi = app.add_subcommand("psi", "Running-maximum functional of a decorated path (d = 1)");
  std::string psi_file;
  psi->add_option("x", psi_file)->required()->check(CLI::ExistingFile);
  psi->add_option("--out", out_file);

  // simulate / induce
  std::string map_name_arg;
  double alpha = 0.75;
  std::size_t n = 1000, samples = 1;
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "Sample W_n paths with x drawn from the reference measure");
  sim->add_option("--map", map_name_arg)->required()->check(CLI::IsMember({"doubling", "tripling", "lsv", "gauss", "double-lsv"}));
  sim->add_option("--alpha", alpha);
  sim->add_option("--n", n)->check(CLI::PositiveNumber);
  sim->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed);
  sim->add_option("--out", out_file);
  auto* ind = app.add_subcommand("induce", "Induced samples (x0, R, V) as CSV");
  ind->add_option("--map", map_name_arg)->required()->check(CLI::IsMember({"doubling", "tripling", "lsv", "gauss", "double-lsv"}));
  ind->add_option("--alpha", alpha);
  ind->add_option("--samples", samples)->check(CLI::PositiveNumber);
  ind->add_option("--seed", seed);
  ind->add_option("--out", out_file);

  // stable
  auto* st = app.add_subcommand("stable", "Stable laws and Levy paths");
  st->require_subcommand(1);
  std::string nu_file, grid_file;
  std::size_t paths = 1, truncation = 1000, grid = 64;
  auto* st_sample = st->add_subcommand("sample", "Sample Levy paths (JSON lines)");
  st_sample->add_option("--alpha", alpha)->required();
  st_sample->add_option("--nu", nu_file)->required()->check(CLI::ExistingFile);
  st_sample->add_option("--paths", paths)->check(CLI::PositiveNumber);
  st_sample->add_option("--seed", seed);
  st_sample->add_option("--truncation", truncation, "Expected number of listed jumps")->check(CLI::PositiveNumber);
  st_sample->add_option("--grid", grid, "Cells for the small-jump part")->check(CLI::PositiveNumber);
  st_sample->add_option("--out", out_file);
  auto* st_chf = st->add_subcommand("chf", "Characteristic function on a grid (CSV)");
  st_chf->add_option("--alpha", alpha)->required();
  st_chf->add_option("--nu", nu_file)->required()->check(CLI::ExistingFile);
  st_chf->add_option("--s-grid", grid_file)->required()->check(CLI::ExistingFile);
  st_chf->add_option("--out", out_file);

  // profile-cusp
  auto* cusp = app.add_subcommand("profile-cusp", "Profile from flat-cusp boundary traces");
  double beta = 3.0;
  std::string traces_file;
  std::size_t quadrature = 2048;
  cusp->add_option("--beta", beta)->required();
  cusp->add_option("--traces", traces_file)->required()->check(CLI::ExistingFile);
  cusp->add_option("--quadrature", quadrature)->check(CLI::PositiveNumber);
  cusp->add_option("--out", out_file);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Config-driven experiments");
  exp->require_subcommand(1);
  std::string config_file, results_file, format = "csv";
  auto* exp_run = exp->add_subcommand("run", "Run an experiment config");
  exp_run->add_option("config", config_file)->required()->check(CLI::ExistingFile);
  auto* exp_report = exp->add_subcommand("report", "Render results.bin");
  exp_report->add_option("results", results_file)->required()->check(CLI::ExistingFile);
  exp_report->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  exp_report->add_option("--out", out_file);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dist->parsed()) {
      std::cout << distance(metric, delta, read_json(file_a), read_json(file_b)).dump() << "\n";
    } else if (deco->parsed()) {
      std::ifstream in(levy_file);
      std::string first;
      std::getline(in, first);
      json lj;
      try {
        lj = json::parse(first);
      } catch (const json::parse_error&) {
        lj = read_json(levy_file);
      }
      const Decorated x = decorate_levy(levy_from_json(lj), profiles_from_json(read_json(profiles_file)));
      Sink(out_file).out() << to_json(x).dump() << "\n";
    } else if (psi->parsed()) {
      Sink(out_file).out() << to_json(Path(psi_max(decorated_from_json(read_json(psi_file))))).dump() << "\n";
    } else if (sim->parsed()) {
      const auto scheme = InducedScheme::canonical(parse_map(map_name_arg, alpha), alpha);
      Sink sink(out_file);
      for (std::size_t k = 0; k < samples; ++k) {
        Rng rng = make_stream(seed, k);
        sink.out() << to_json(Path(wn_path(scheme, scheme.sample_mu(rng), n).path)).dump() << "\n";
      }
    } else if (ind->parsed()) {
      const auto scheme = InducedScheme::canonical(parse_map(map_name_arg, alpha), alpha);
      Rng rng = make_stream(seed, 0);
      const auto rows = induce(scheme, samples, rng);
      Sink sink(out_file);
      sink.out() << "x0,R";
      for (std::size_t i = 0; i < scheme.dim(); ++i) sink.out() << ",V_" << i + 1;
      sink.out() << "\n";
      for (const auto& r : rows) {
        sink.out() << num(r.x0) << ',' << r.R;
        for (double v : r.V) sink.out() << ',' << num(v);
        sink.out() << "\n";
      }
    } else if (st_sample->parsed()) {
      const SpectralMeasure nu = spectral_from_json(read_json(nu_file));
      Sink sink(out_file);
      for (std::size_t k = 0; k < paths; ++k) {
        Rng rng = make_stream(seed, k);
        sink.out() << to_json(sample_path(alpha, nu, truncation, grid, rng)).dump() << "\n";
      }
    } else if (st_chf->parsed()) {
      const SpectralMeasure nu = spectral_from_json(read_json(nu_file));
      Sink sink(out_file);
      for (std::size_t i = 0; i < nu.dim(); ++i) sink.out() << "s_" << i + 1 << ',';
      sink.out() << "re,im\n";
      for (const Vec& s : read_grid_csv(grid_file, nu.dim())) {
        const auto phi = char_fn(alpha, nu, s);
        for (double x : s) sink.out() << num(x) << ',';
        sink.out() << num(phi.real()) << ',' << num(phi.imag()) << "\n";
      }
    } else if (cusp->parsed()) {
      std::ifstream in(traces_file);
      const CuspData data = read_cusp_csv(in, CuspData::alpha_from_beta(beta));
      const CuspProfile p = cusp_profile(data, quadrature);
      json j = {{"alpha", data.alpha},
                {"mode", to_string(classify_cusp(p))},
                {"terminal_norm", p.terminal_norm},
                {"quadrature_error", p.quadrature_error},
                {"omega", p.profile.direction()},
                {"path", to_json(p.profile.path())}};
      Sink(out_file).out() << j.dump() << "\n";
    } else if (exp_run->parsed()) {
      const ExperimentConfig cfg = load_config(config_file);
      const RunResult r = run_experiment(cfg);
      if (cfg.csv.empty() && cfg.output.empty()) std::cout << to_csv(r);
    } else if (exp_report->parsed()) {
      const RunResult r = read_results(results_file);
      const ReportFormat f = format == "json" ? ReportFormat::Json : ReportFormat::Csv;
      if (out_file.empty() || out_file == "-") std::cout << render_report(r, f);
      else emit_report(r, f, out_file);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PartialResultError& e) {
    std::cerr << "partial result: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
