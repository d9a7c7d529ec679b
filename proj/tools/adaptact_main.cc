// Command-line front end for the experiment harness.
//
//   adaptact run --synthetic xor2d --activation elu --mode m3
//   adaptact grid --data filament.csv --label material --out results
//   adaptact sweep-nh --data filament.csv --label material --activation elu
//   adaptact alpha-hist --data filament.csv --label material --activation softplus

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "adaptact/harness.h"

namespace {

using adaptact::ExperimentConfig;
using adaptact::ExperimentReport;

struct Options {
  std::string data;
  std::string synthetic;
  std::size_t synthetic_n = 70;
  std::string label = "label";
  std::string activation;
  std::string mode;
  std::size_t nh = 2;
  double delta = 0.1;
  std::size_t splits = 20;
  double test_frac = 0.3;
  std::size_t epochs = 100;
  double lr = 0.05;
  std::uint64_t seed = 0;
  double holdout = 0.0;
  std::string out = "results";
  std::string format = "csv";
  std::size_t threads = 1;
  std::size_t bins = 20;
  bool no_standardize = false;
};

void AddCommonFlags(CLI::App* cmd, Options& o) {
  auto* data = cmd->add_option("--data", o.data, "CSV file with a header row");
  auto* synth = cmd->add_option("--synthetic", o.synthetic,
                                "Synthetic dataset: xor2d, blobs3 or ring2d");
  data->excludes(synth);
  cmd->add_option("--synthetic-n", o.synthetic_n,
                  "Rows generated for --synthetic")
      ->capture_default_str();
  cmd->add_option("--label", o.label, "Label column name")->capture_default_str();
  cmd->add_option("--activation", o.activation, "elu, softplus or swish");
  cmd->add_option("--mode", o.mode, "m1 (fixed), m2 (shared) or m3 (individual)");
  cmd->add_option("--nh", o.nh, "Hidden units")->capture_default_str();
  cmd->add_option("--delta", o.delta, "Conformal miscoverage level")
      ->capture_default_str();
  cmd->add_option("--splits", o.splits, "Random train/test splits")
      ->capture_default_str();
  cmd->add_option("--test-frac", o.test_frac, "Test share of each split")
      ->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "Full-batch Adam epochs")
      ->capture_default_str();
  cmd->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--holdout-calibration", o.holdout,
                  "Share of training rows held out for conformal calibration "
                  "(0 calibrates on the training rows)")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--format", o.format, "csv or json")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads per cell")
      ->capture_default_str();
  cmd->add_flag("--no-standardize", o.no_standardize,
                "Feed raw features to the network");
}

ExperimentConfig ToConfig(const Options& o, const char* default_activation,
                          const char* default_mode) {
  ExperimentConfig c;
  c.source.csv_path = o.data;
  c.source.synthetic = o.synthetic;
  c.source.synthetic_n = o.synthetic_n;
  c.source.label_column = o.label;
  c.activation = adaptact::ParseActivationKind(
      o.activation.empty() ? default_activation : o.activation);
  c.mode = adaptact::ParseAlphaMode(o.mode.empty() ? default_mode : o.mode);
  c.hidden_units = o.nh;
  c.delta = o.delta;
  c.n_splits = o.splits;
  c.test_fraction = o.test_frac;
  c.epochs = o.epochs;
  c.learning_rate = o.lr;
  c.seed = o.seed;
  c.holdout_calibration = o.holdout;
  c.standardize = !o.no_standardize;
  c.threads = o.threads;
  c.Validate();
  return c;
}

void PrintSummaries(const std::vector<ExperimentReport>& reports) {
  fmt::print("{:<9} {:<4} {:>3}  {:>8} {:>8} {:>8}  {:>8} {:>8}\n", "act",
             "mode", "nh", "acc.min", "acc.med", "acc.max", "cov.med",
             "size.med");
  for (const ExperimentReport& r : reports) {
    fmt::print("{:<9} {:<4} {:>3}  {:>8.3f} {:>8.3f} {:>8.3f}  {:>8.3f} "
               "{:>8.3f}{}\n",
               adaptact::ToString(r.config.activation),
               adaptact::ToString(r.config.mode), r.config.hidden_units,
               r.accuracy.min, r.accuracy.median, r.accuracy.max,
               r.coverage.median, r.avg_set_size.median,
               r.complete ? "" : "  (incomplete)");
    for (const auto& s : r.splits) {
      if (!s.ok) std::fprintf(stderr, "warning: %s\n", s.error.c_str());
    }
  }
}

void Written(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) fmt::print("wrote {}\n", p.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trainable activation functions and conformal prediction sets "
               "on small tabular datasets"};
  app.require_subcommand(1);

  Options o;
  auto* run = app.add_subcommand("run", "Evaluate one activation/mode cell");
  auto* grid = app.add_subcommand("grid", "Every activation x mode cell");
  auto* sweep = app.add_subcommand(
      "sweep-nh", "Hidden-unit sweep (2, 4, 6, 8) over every mode");
  auto* hist = app.add_subcommand(
      "alpha-hist", "Histogram of alphas learned in individual mode");
  for (auto* cmd : {run, grid, sweep, hist}) AddCommonFlags(cmd, o);
  hist->add_option("--bins", o.bins, "Histogram bins")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const adaptact::ExportFormat format = adaptact::ParseExportFormat(o.format);
    const std::filesystem::path out_dir = o.out;

    if (run->parsed()) {
      if (o.activation.empty() || o.mode.empty()) {
        throw std::invalid_argument("run needs --activation and --mode");
      }
      const ExperimentConfig config = ToConfig(o, "elu", "m1");
      const std::vector<ExperimentReport> reports{adaptact::RunCell(config)};
      PrintSummaries(reports);
      Written(adaptact::Export(reports, format, out_dir));
    } else if (grid->parsed()) {
      const ExperimentConfig config = ToConfig(o, "elu", "m1");
      const adaptact::Dataset data =
          adaptact::LoadSource(config.source, config.seed);
      const auto reports = adaptact::RunGrid(config, data);
      PrintSummaries(reports);
      Written(adaptact::Export(reports, format, out_dir));
    } else if (sweep->parsed()) {
      const ExperimentConfig config = ToConfig(o, "elu", "m1");
      const adaptact::Dataset data =
          adaptact::LoadSource(config.source, config.seed);
      const auto reports = adaptact::NhSweep(config, data);
      PrintSummaries(reports);
      // One directory per hidden-unit count keeps the CSV columns unchanged.
      for (std::size_t i = 0; i < reports.size(); i += 3) {
        const std::size_t nh = reports[i].config.hidden_units;
        Written(adaptact::Export(
            std::span<const ExperimentReport>(reports).subspan(i, 3), format,
            out_dir / fmt::format("nh{}", nh)));
      }
    } else if (hist->parsed()) {
      const ExperimentConfig config = ToConfig(o, "elu", "m3");
      if (config.mode != adaptact::AlphaMode::kIndividual) {
        throw std::invalid_argument("alpha-hist needs --mode m3");
      }
      const std::vector<ExperimentReport> reports{adaptact::RunCell(config)};
      const adaptact::Histogram h = adaptact::AlphaHistogram(reports[0], o.bins);
      PrintSummaries(reports);
      fmt::print("{} pooled alphas\n", h.total());
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        fmt::print("  [{:>8.4f}, {:>8.4f})  {}\n", h.edges[b], h.edges[b + 1],
                   h.counts[b]);
      }
      auto paths = adaptact::Export(reports, format, out_dir);
      adaptact::WriteFile(out_dir / "alpha_hist.csv", adaptact::HistogramCsv(h));
      paths.push_back(out_dir / "alpha_hist.csv");
      Written(paths);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
