#include "adaptact/harness.h"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>
#include <thread>

#include "adaptact/conformal.h"
#include "adaptact/optimizer.h"

namespace adaptact {

namespace {

enum class SeedTag : std::uint32_t { kInit = 1, kHoldout = 2 };

std::uint64_t DeriveSeed(std::uint64_t master, std::size_t split_index,
                         SeedTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(split_index),
                    static_cast<std::uint32_t>(tag)};
  std::uint32_t out[2];
  seq.generate(std::begin(out), std::end(out));
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::size_t CountCorrect(const Network& net, const Dataset& data) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (Predict(net, data.row(i)) == data.labels[i]) ++correct;
  }
  return correct;
}

SplitResult RunSplit(const ExperimentConfig& config, const Dataset& data,
                     std::size_t split_index) {
  SplitResult result;
  result.split_index = split_index;

  const SplitIndices idx = CellSplit(config, data.size(), split_index);
  Dataset fit = Subset(data, idx.train);
  Dataset test = Subset(data, idx.test);
  Dataset calibration;
  const bool holdout = config.holdout_calibration > 0.0;
  if (holdout) {
    const SplitPlan inner{
        DeriveSeed(config.seed, split_index, SeedTag::kHoldout),
        config.holdout_calibration, 1};
    const SplitIndices cal_idx = MakeSplit(fit.size(), inner, 0);
    calibration = Subset(fit, cal_idx.test);
    fit = Subset(fit, cal_idx.train);
  }

  if (config.standardize) {
    const Standardizer standardizer = Standardizer::Fit(fit);
    fit = standardizer.Apply(fit);
    test = standardizer.Apply(test);
    if (holdout) calibration = standardizer.Apply(calibration);
  }

  const NetworkSpec spec{data.dim(), config.hidden_units, data.num_classes(),
                         config.activation, config.mode};
  const TrainConfig train_config{config.epochs, config.learning_rate};
  const TrainResult trained =
      Train(spec, fit.view(), train_config,
            DeriveSeed(config.seed, split_index, SeedTag::kInit));
  const Network& net = trained.network;

  result.final_train_loss = Loss(net, fit.view());
  if (!std::isfinite(result.final_train_loss)) {
    throw TrainingError(config.epochs, "non-finite training loss after the "
                                       "final epoch");
  }
  result.accuracy = static_cast<double>(CountCorrect(net, test)) /
                    static_cast<double>(test.size());

  const Dataset& cal_set = holdout ? calibration : fit;
  const ConformalEvaluation eval =
      CalibrateAndEvaluate(net, cal_set.view(), test.view(), config.delta);
  result.coverage = eval.coverage;
  result.avg_set_size = eval.avg_set_size;
  result.q_hat = eval.calibration.q_hat;
  result.learned_alphas = net.params().alphas;
  return result;
}

SplitResult RunSplitCaught(const ExperimentConfig& config, const Dataset& data,
                           std::size_t split_index) {
  try {
    return RunSplit(config, data, split_index);
  } catch (const TrainingError& e) {
    SplitResult failed;
    failed.split_index = split_index;
    failed.ok = false;
    failed.error = fmt::format("split {}: training aborted at epoch {}: {}",
                               split_index, e.epoch(), e.what());
    return failed;
  } catch (const std::exception& e) {
    SplitResult failed;
    failed.split_index = split_index;
    failed.ok = false;
    failed.error = fmt::format("split {}: {}", split_index, e.what());
    return failed;
  }
}

void FillSummaries(ExperimentReport& report) {
  std::vector<double> acc, cov, size, loss;
  report.complete = true;
  for (const SplitResult& s : report.splits) {
    if (!s.ok) {
      report.complete = false;
      continue;
    }
    acc.push_back(s.accuracy);
    cov.push_back(s.coverage);
    size.push_back(s.avg_set_size);
    loss.push_back(s.final_train_loss);
  }
  report.accuracy = Summarize(acc);
  report.coverage = Summarize(cov);
  report.avg_set_size = Summarize(size);
  report.final_train_loss = Summarize(loss);
}

std::string Num(double v) { return fmt::format("{}", v); }

}  // namespace

std::string DataSource::Describe() const {
  if (!csv_path.empty()) return csv_path;
  return fmt::format("synthetic:{}:{}", synthetic, synthetic_n);
}

Dataset LoadSource(const DataSource& source, std::uint64_t seed) {
  Dataset data;
  if (!source.csv_path.empty()) {
    data = LoadCsv(source.csv_path, source.label_column);
  } else if (!source.synthetic.empty()) {
    data = MakeSynthetic(ParseSyntheticKind(source.synthetic),
                         source.synthetic_n, seed);
  } else {
    throw std::invalid_argument("no data source: pass a CSV path or a "
                                "synthetic dataset kind");
  }
  data.Validate();
  return data;
}

void ExperimentConfig::Validate() const {
  if (hidden_units < 1) throw std::invalid_argument("--nh must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("--delta must lie in (0, 1)");
  }
  if (n_splits < 1) throw std::invalid_argument("--splits must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("--test-frac must lie in (0, 1)");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("--lr must be > 0");
  if (!(holdout_calibration >= 0.0 && holdout_calibration < 1.0)) {
    throw std::invalid_argument("--holdout-calibration must lie in [0, 1)");
  }
}

double SortedQuantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Summary Summarize(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {SortedQuantile(sorted, 0.0), SortedQuantile(sorted, 0.25),
          SortedQuantile(sorted, 0.5), SortedQuantile(sorted, 0.75),
          SortedQuantile(sorted, 1.0)};
}

SplitIndices CellSplit(const ExperimentConfig& config, std::size_t n,
                       std::size_t split_index) {
  const SplitPlan plan{config.seed, config.test_fraction, config.n_splits};
  return MakeSplit(n, plan, split_index);
}

ExperimentReport RunCell(const ExperimentConfig& config, const Dataset& data) {
  config.Validate();
  data.Validate();
  ExperimentReport report;
  report.config = config;
  report.splits.resize(config.n_splits);

  const std::size_t workers =
      std::clamp<std::size_t>(config.threads, 1, config.n_splits);
  if (workers == 1) {
    for (std::size_t s = 0; s < config.n_splits; ++s) {
      report.splits[s] = RunSplitCaught(config, data, s);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t s = next++; s < config.n_splits; s = next++) {
          report.splits[s] = RunSplitCaught(config, data, s);
        }
      });
    }
  }
  FillSummaries(report);
  return report;
}

ExperimentReport RunCell(const ExperimentConfig& config) {
  return RunCell(config, LoadSource(config.source, config.seed));
}

std::vector<ExperimentReport> RunGrid(const ExperimentConfig& base,
                                      const Dataset& data) {
  std::vector<ExperimentReport> reports;
  for (ActivationKind kind : kAllActivations) {
    for (AlphaMode mode : kAllModes) {
      ExperimentConfig cell = base;
      cell.activation = kind;
      cell.mode = mode;
      reports.push_back(RunCell(cell, data));
    }
  }
  return reports;
}

std::vector<ExperimentReport> NhSweep(const ExperimentConfig& base,
                                      const Dataset& data,
                                      std::span<const std::size_t> values) {
  std::vector<ExperimentReport> reports;
  for (std::size_t nh : values) {
    for (AlphaMode mode : kAllModes) {
      ExperimentConfig cell = base;
      cell.hidden_units = nh;
      cell.mode = mode;
      reports.push_back(RunCell(cell, data));
    }
  }
  return reports;
}

std::size_t Histogram::total() const {
  std::size_t t = 0;
  for (std::size_t c : counts) t += c;
  return t;
}

std::vector<double> PooledAlphas(const ExperimentReport& report) {
  if (report.config.mode != AlphaMode::kIndividual) {
    throw std::invalid_argument("alpha histogram needs an m3 (individual) "
                                "report, got " +
                                ToString(report.config.mode));
  }
  std::vector<double> pooled;
  for (const SplitResult& s : report.splits) {
    if (!s.ok) continue;
    pooled.insert(pooled.end(), s.learned_alphas.begin(),
                  s.learned_alphas.end());
  }
  return pooled;
}

Histogram AlphaHistogram(const ExperimentReport& report, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs >= 1 bin");
  const std::vector<double> pooled = PooledAlphas(report);
  if (pooled.empty()) throw std::invalid_argument("no learned alphas to bin");
  const auto [min_it, max_it] = std::minmax_element(pooled.begin(), pooled.end());
  double lo = *min_it;
  double hi = *max_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);

  Histogram h;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = lo + width * static_cast<double>(b);
  }
  h.edges[bins] = hi;
  for (double a : pooled) {
    auto b = static_cast<std::size_t>((a - lo) / width);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

std::string MetricsCsv(std::span<const ExperimentReport> reports) {
  std::string out =
      "activation,mode,split,accuracy,coverage,avg_set_size,final_train_loss\n";
  for (const ExperimentReport& r : reports) {
    const std::string act = ToString(r.config.activation);
    const std::string mode = ToString(r.config.mode);
    for (const SplitResult& s : r.splits) {
      if (!s.ok) continue;
      out += fmt::format("{},{},{},{},{},{},{}\n", act, mode, s.split_index,
                         Num(s.accuracy), Num(s.coverage), Num(s.avg_set_size),
                         Num(s.final_train_loss));
    }
  }
  return out;
}

std::string AlphasCsv(std::span<const ExperimentReport> reports) {
  std::string out = "activation,mode,split,unit,alpha\n";
  for (const ExperimentReport& r : reports) {
    const std::string act = ToString(r.config.activation);
    const std::string mode = ToString(r.config.mode);
    for (const SplitResult& s : r.splits) {
      if (!s.ok) continue;
      for (std::size_t u = 0; u < s.learned_alphas.size(); ++u) {
        out += fmt::format("{},{},{},{},{}\n", act, mode, s.split_index, u,
                           Num(s.learned_alphas[u]));
      }
    }
  }
  return out;
}

std::string SummaryCsv(std::span<const ExperimentReport> reports) {
  std::string out =
      "activation,mode,hidden_units,metric,n,min,q1,median,q3,max,complete\n";
  for (const ExperimentReport& r : reports) {
    std::size_t n_ok = 0;
    for (const SplitResult& s : r.splits) n_ok += s.ok ? 1 : 0;
    const std::pair<const char*, const Summary*> metrics[] = {
        {"accuracy", &r.accuracy},
        {"coverage", &r.coverage},
        {"avg_set_size", &r.avg_set_size},
        {"final_train_loss", &r.final_train_loss}};
    for (const auto& [name, s] : metrics) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n",
                         ToString(r.config.activation), ToString(r.config.mode),
                         r.config.hidden_units, name, n_ok, Num(s->min),
                         Num(s->q1), Num(s->median), Num(s->q3), Num(s->max),
                         r.complete ? "true" : "false");
    }
  }
  return out;
}

std::string HistogramCsv(const Histogram& histogram) {
  std::string out = "bin,lo,hi,count\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    out += fmt::format("{},{},{},{}\n", b, Num(histogram.edges[b]),
                       Num(histogram.edges[b + 1]), histogram.counts[b]);
  }
  return out;
}

std::string ReportJson(std::span<const ExperimentReport> reports) {
  using nlohmann::ordered_json;
  auto summary = [](const Summary& s) {
    return ordered_json{{"min", s.min},
                        {"q1", s.q1},
                        {"median", s.median},
                        {"q3", s.q3},
                        {"max", s.max}};
  };
  ordered_json cells = ordered_json::array();
  for (const ExperimentReport& r : reports) {
    const ExperimentConfig& c = r.config;
    ordered_json config{{"source", c.source.Describe()},
                        {"label_column", c.source.label_column},
                        {"activation", ToString(c.activation)},
                        {"mode", ToString(c.mode)},
                        {"hidden_units", c.hidden_units},
                        {"delta", c.delta},
                        {"n_splits", c.n_splits},
                        {"test_fraction", c.test_fraction},
                        {"epochs", c.epochs},
                        {"learning_rate", c.learning_rate},
                        {"seed", c.seed},
                        {"holdout_calibration", c.holdout_calibration},
                        {"standardize", c.standardize}};
    ordered_json splits = ordered_json::array();
    for (const SplitResult& s : r.splits) {
      ordered_json row{{"split", s.split_index}, {"ok", s.ok}};
      if (s.ok) {
        row["accuracy"] = s.accuracy;
        row["coverage"] = s.coverage;
        row["avg_set_size"] = s.avg_set_size;
        row["q_hat"] = s.q_hat;
        row["final_train_loss"] = s.final_train_loss;
        row["learned_alphas"] = s.learned_alphas;
      } else {
        row["error"] = s.error;
      }
      splits.push_back(std::move(row));
    }
    cells.push_back(ordered_json{
        {"config", std::move(config)},
        {"complete", r.complete},
        {"summary",
         {{"accuracy", summary(r.accuracy)},
          {"coverage", summary(r.coverage)},
          {"avg_set_size", summary(r.avg_set_size)},
          {"final_train_loss", summary(r.final_train_loss)}}},
        {"splits", std::move(splits)}});
  }
  return ordered_json{{"reports", std::move(cells)}}.dump(2) + "\n";
}

ExportFormat ParseExportFormat(std::string_view name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  throw std::invalid_argument("unknown format '" + std::string(name) +
                              "' (expected csv or json)");
}

void WriteFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<std::filesystem::path> Export(
    std::span<const ExperimentReport> reports, ExportFormat format,
    const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create '" + dir.string() +
                             "': " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const std::string& contents) {
    WriteFile(dir / name, contents);
    written.push_back(dir / name);
  };
  switch (format) {
    case ExportFormat::kCsv:
      emit("metrics.csv", MetricsCsv(reports));
      emit("alphas.csv", AlphasCsv(reports));
      emit("summary.csv", SummaryCsv(reports));
      break;
    case ExportFormat::kJson:
      emit("report.json", ReportJson(reports));
      break;
  }
  return written;
}

}  // namespace adaptact
