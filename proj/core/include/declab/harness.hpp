#pragma once

// Config-driven experiments over seeds, median aggregation and reports.
// The config schema is documented in docs/experiment-config.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace declab {

enum class ExperimentKind { MarginalKs, Overshoot, HypothesisTrend, Lapnumber, ExcursionShape, ProfileClassify, ChfCheck };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct ExperimentConfig {
  std::string experiment;
  ExperimentKind kind = ExperimentKind::Lapnumber;
  std::string map;
  std::optional<double> alpha;
  std::vector<std::size_t> n;
  std::size_t seeds = 1;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::string output;  // results.bin path, empty for none
  std::string csv;     // CSV path, empty for none
  bool timing = false;
  std::size_t threads = 1;
  std::size_t return_cap = 10'000'000;  // first-return cap for map kinds
  nlohmann::json params = nlohmann::json::object();
  std::string base_dir;  // relative trace files resolve against this
};

// Parses and cross-validates; ConfigError names the offending field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& file);

// seed == -1 marks a median-over-seeds aggregate; n == 0 marks a record that
// does not depend on n.
struct Record {
  std::string experiment;
  std::string kind;
  std::uint64_t n = 0;
  std::int64_t seed = 0;
  std::string statistic;
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double runtime_s = 0.0;

  bool operator==(const Record&) const = default;
};

struct RunResult {
  std::vector<Record> records;

  // Aggregate record for (statistic, n); nullopt if absent.
  std::optional<Record> aggregate(const std::string& statistic, std::uint64_t n = 0) const;
};

class PartialResultError : public std::runtime_error {
 public:
  PartialResultError(const std::string& msg, std::vector<std::int64_t> completed, RunResult partial)
      : std::runtime_error(msg), completed_(std::move(completed)), partial_(std::move(partial)) {}
  const std::vector<std::int64_t>& completed_seeds() const noexcept { return completed_; }
  const RunResult& partial() const noexcept { return partial_; }

 private:
  std::vector<std::int64_t> completed_;
  RunResult partial_;
};

// Median with a distribution-free ~95% order-statistic interval.
struct MedianCi {
  double median = 0.0, lo = 0.0, hi = 0.0;
};
MedianCi median_ci(std::vector<double> xs);

// Runs every (n, seed) task, adds per-statistic aggregates, and writes
// cfg.output / cfg.csv when set.
RunResult run_experiment(const ExperimentConfig& cfg);

std::string to_csv(const RunResult& r);
nlohmann::json to_json(const RunResult& r);
RunResult result_from_json(const nlohmann::json& j);

// results.bin is the CBOR encoding of to_json.
void write_results(const RunResult& r, const std::filesystem::path& file);
RunResult read_results(const std::filesystem::path& file);

enum class ReportFormat { Csv, Json };
// Writes r to file; DomainError for an empty result, std::runtime_error with
// the system message on I/O failure.
void emit_report(const RunResult& r, ReportFormat format, const std::filesystem::path& file);
std::string render_report(const RunResult& r, ReportFormat format);

}  // namespace declab
