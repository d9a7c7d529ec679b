#ifndef ADAPTACT_HARNESS_H_
#define ADAPTACT_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "adaptact/activations.h"
#include "adaptact/data.h"
#include "adaptact/network.h"

namespace adaptact {

// Where the rows come from: a CSV file, or a synthetic generator seeded with
// the experiment's master seed.
struct DataSource {
  std::string csv_path;
  std::string label_column = "label";
  std::string synthetic;  // xor2d, blobs3 or ring2d; used when csv_path is empty
  std::size_t synthetic_n = 70;

  std::string Describe() const;
};

Dataset LoadSource(const DataSource& source, std::uint64_t seed);

struct ExperimentConfig {
  DataSource source;
  ActivationKind activation = ActivationKind::kElu;
  AlphaMode mode = AlphaMode::kFixed;
  std::size_t hidden_units = 2;
  double delta = 0.1;
  std::size_t n_splits = 20;
  double test_fraction = 0.3;
  std::size_t epochs = 100;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  // 0 calibrates on the training rows. A value in (0, 1) holds that share of
  // the training rows out of fitting and calibrates on them instead.
  double holdout_calibration = 0.0;
  bool standardize = true;
  // Worker threads per cell; results do not depend on this.
  std::size_t threads = 1;

  void Validate() const;
};

struct SplitResult {
  std::size_t split_index = 0;
  bool ok = true;
  std::string error;  // diagnostic when !ok
  double accuracy = 0.0;
  double coverage = 0.0;
  double avg_set_size = 0.0;
  double q_hat = 0.0;
  double final_train_loss = 0.0;
  std::vector<double> learned_alphas;

  bool operator==(const SplitResult&) const = default;
};

// Five-number summary; quartiles interpolate linearly between order
// statistics (the "type 7" rule).
struct Summary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  bool operator==(const Summary&) const = default;
};

Summary Summarize(std::span<const double> values);
// Type-7 sample quantile of already sorted values, p in [0, 1].
double SortedQuantile(std::span<const double> sorted, double p);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SplitResult> splits;
  // False when at least one split failed; summaries then cover the rest.
  bool complete = true;
  Summary accuracy;
  Summary coverage;
  Summary avg_set_size;
  Summary final_train_loss;
};

// Per-split protocol: partition, standardize on the training rows, train,
// score test accuracy, calibrate conformal sets and evaluate them on the
// test rows. Splits run on config.threads workers; output is identical for
// any thread count.
ExperimentReport RunCell(const ExperimentConfig& config, const Dataset& data);
ExperimentReport RunCell(const ExperimentConfig& config);

// Partition used for split `split_index` under `config`; identical for every
// cell that shares the seed, size and split settings.
SplitIndices CellSplit(const ExperimentConfig& config, std::size_t n,
                       std::size_t split_index);

// Every activation x mode combination on the same data and splits, in
// activation-major order (elu m1, elu m2, ..., swish m3).
std::vector<ExperimentReport> RunGrid(const ExperimentConfig& base,
                                      const Dataset& data);

// Hidden-unit sweep for the base activation, every mode per value, ordered
// by value then mode.
inline constexpr std::size_t kDefaultSweepValues[] = {2, 4, 6, 8};
std::vector<ExperimentReport> NhSweep(
    const ExperimentConfig& base, const Dataset& data,
    std::span<const std::size_t> values = kDefaultSweepValues);

struct Histogram {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<std::size_t> counts;
  std::size_t total() const;
};

// All learned alphas of an individual-mode report.
std::vector<double> PooledAlphas(const ExperimentReport& report);

// Fixed-width histogram of PooledAlphas over the observed range. A single
// distinct value lands in one bin of width 1 centred on it. Throws for
// reports not run in individual mode.
Histogram AlphaHistogram(const ExperimentReport& report, std::size_t bins = 20);

// Byte-stable renderings of a set of reports.
std::string MetricsCsv(std::span<const ExperimentReport> reports);
std::string AlphasCsv(std::span<const ExperimentReport> reports);
std::string SummaryCsv(std::span<const ExperimentReport> reports);
std::string ReportJson(std::span<const ExperimentReport> reports);
std::string HistogramCsv(const Histogram& histogram);

enum class ExportFormat { kCsv, kJson };
ExportFormat ParseExportFormat(std::string_view name);

// Writes metrics.csv, alphas.csv and summary.csv (kCsv) or report.json
// (kJson) into `dir`, creating it if needed. Returns the written paths.
std::vector<std::filesystem::path> Export(
    std::span<const ExperimentReport> reports, ExportFormat format,
    const std::filesystem::path& dir);

// Writes `contents` to `path`; throws std::runtime_error when unwritable.
void WriteFile(const std::filesystem::path& path, const std::string& contents);

}  // namespace adaptact

#endif  // ADAPTACT_HARNESS_H_
