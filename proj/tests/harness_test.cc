#include "adaptact/harness.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "adaptact/network.h"

namespace adaptact {
namespace {

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.source.synthetic = "xor2d";
  c.n_splits = 4;
  c.epochs = 30;
  return c;
}

const Dataset& Xor70() {
  static const Dataset data = MakeSynthetic(SyntheticKind::kXor2d, 70, 0);
  return data;
}

TEST(SummaryTest, TypeSevenQuartiles) {
  const Summary a = Summarize(std::vector<double>{4, 2, 1, 3});
  EXPECT_EQ(a, (Summary{1.0, 1.75, 2.5, 3.25, 4.0}));
  const Summary b = Summarize(std::vector<double>{3, 1, 4, 1, 5, 9, 2, 6});
  EXPECT_EQ(b, (Summary{1.0, 1.75, 3.5, 5.25, 9.0}));
  const Summary one = Summarize(std::vector<double>{0.7});
  EXPECT_EQ(one, (Summary{0.7, 0.7, 0.7, 0.7, 0.7}));
  EXPECT_TRUE(std::isnan(Summarize(std::vector<double>{}).median));
}

TEST(RunCellTest, SingleSplitIsReproducible) {
  ExperimentConfig c = SmallConfig();
  c.n_splits = 1;
  c.mode = AlphaMode::kIndividual;
  const ExperimentReport a = RunCell(c, Xor70());
  const ExperimentReport b = RunCell(c, Xor70());
  ASSERT_EQ(a.splits.size(), 1u);
  EXPECT_EQ(a.splits[0], b.splits[0]);
  EXPECT_TRUE(a.complete);
}

TEST(RunCellTest, AlphaCountFollowsMode) {
  ExperimentConfig c = SmallConfig();
  c.hidden_units = 3;
  for (AlphaMode mode : kAllModes) {
    c.mode = mode;
    const ExperimentReport r = RunCell(c, Xor70());
    const NetworkSpec spec{2, 3, 2, c.activation, mode};
    for (const SplitResult& s : r.splits) {
      ASSERT_TRUE(s.ok) << s.error;
      EXPECT_EQ(s.learned_alphas.size(), spec.AlphaCount());
      EXPECT_GE(s.accuracy, 0.0);
      EXPECT_LE(s.accuracy, 1.0);
      EXPECT_GE(s.coverage, 0.0);
      EXPECT_LE(s.coverage, 1.0);
      EXPECT_GE(s.avg_set_size, 0.0);
      EXPECT_LE(s.avg_set_size, 2.0);
    }
  }
}

TEST(RunCellTest, ParallelMatchesSerial) {
  ExperimentConfig c = SmallConfig();
  c.n_splits = 8;
  c.mode = AlphaMode::kShared;
  c.activation = ActivationKind::kSwish;
  const ExperimentReport serial = RunCell(c, Xor70());
  c.threads = 4;
  const ExperimentReport parallel = RunCell(c, Xor70());
  EXPECT_EQ(serial.splits, parallel.splits);
  EXPECT_EQ(MetricsCsv(std::span(&serial, 1)), MetricsCsv(std::span(&parallel, 1)));
}

TEST(RunCellTest, HoldoutCalibrationChangesCalibrationRows) {
  ExperimentConfig c = SmallConfig();
  c.mode = AlphaMode::kIndividual;
  const ExperimentReport train_cal = RunCell(c, Xor70());
  c.holdout_calibration = 0.3;
  const ExperimentReport held_out = RunCell(c, Xor70());
  ASSERT_TRUE(held_out.complete);
  EXPECT_NE(train_cal.splits, held_out.splits);
}

TEST(RunCellTest, TrainingFailuresAreRecordedPerSplit) {
  ExperimentConfig c = SmallConfig();
  c.learning_rate = 1e300;
  const ExperimentReport r = RunCell(c, Xor70());
  EXPECT_FALSE(r.complete);
  ASSERT_EQ(r.splits.size(), 4u);
  for (const SplitResult& s : r.splits) {
    EXPECT_FALSE(s.ok);
    EXPECT_NE(s.error.find("split " + std::to_string(s.split_index)),
              std::string::npos);
  }
  // Failed rows stay out of the per-split CSV.
  EXPECT_EQ(MetricsCsv(std::span(&r, 1)),
            "activation,mode,split,accuracy,coverage,avg_set_size,"
            "final_train_loss\n");
}

TEST(RunCellTest, RejectsInvalidConfig) {
  ExperimentConfig c = SmallConfig();
  c.delta = 1.5;
  EXPECT_THROW(RunCell(c, Xor70()), std::invalid_argument);
  c = SmallConfig();
  c.source.synthetic.clear();
  EXPECT_THROW(RunCell(c), std::invalid_argument);
}

TEST(RunCellTest, IndividualEluMatchesOrBeatsFixedOnXor) {
  ExperimentConfig c;
  c.source.synthetic = "xor2d";
  const Dataset data = LoadSource(c.source, c.seed);
  const ExperimentReport m1 = RunCell(c, data);
  c.mode = AlphaMode::kIndividual;
  const ExperimentReport m3 = RunCell(c, data);
  EXPECT_GE(m3.accuracy.median, m1.accuracy.median);
}

TEST(GridTest, NineCellsOnPairedSplits) {
  ExperimentConfig base = SmallConfig();
  const auto reports = RunGrid(base, Xor70());
  ASSERT_EQ(reports.size(), 9u);
  std::size_t i = 0;
  for (ActivationKind kind : kAllActivations) {
    for (AlphaMode mode : kAllModes) {
      EXPECT_EQ(reports[i].config.activation, kind);
      EXPECT_EQ(reports[i].config.mode, mode);
      for (std::size_t s = 0; s < base.n_splits; ++s) {
        EXPECT_EQ(CellSplit(reports[i].config, 70, s), CellSplit(base, 70, s));
      }
      ++i;
    }
  }
  std::istringstream metrics(MetricsCsv(reports));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(metrics, line)) ++rows;
  EXPECT_EQ(rows, 1 + 9 * base.n_splits);
}

TEST(GridTest, AlphaRowsMatchModes) {
  ExperimentConfig base = SmallConfig();
  const auto reports = RunGrid(base, Xor70());
  std::istringstream alphas(AlphasCsv(reports));
  std::string line;
  std::getline(alphas, line);
  EXPECT_EQ(line, "activation,mode,split,unit,alpha");
  std::map<std::string, int> per_mode;
  while (std::getline(alphas, line)) {
    per_mode[line.substr(line.find(',') + 1, 2)] += 1;
  }
  EXPECT_EQ(per_mode.count("m1"), 0u);
  EXPECT_EQ(per_mode["m2"], 3 * 4);
  EXPECT_EQ(per_mode["m3"], 3 * 4 * 2);
}

std::vector<std::vector<std::string>> ParseRows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

TEST(ExportTest, SummariesRecomputeFromExportedRows) {
  ExperimentConfig c = SmallConfig();
  c.n_splits = 7;
  c.mode = AlphaMode::kIndividual;
  const ExperimentReport r = RunCell(c, Xor70());
  std::vector<double> acc, cov, size, loss;
  for (const auto& row : ParseRows(MetricsCsv(std::span(&r, 1)))) {
    acc.push_back(std::stod(row[3]));
    cov.push_back(std::stod(row[4]));
    size.push_back(std::stod(row[5]));
    loss.push_back(std::stod(row[6]));
  }
  EXPECT_EQ(Summarize(acc), r.accuracy);
  EXPECT_EQ(Summarize(cov), r.coverage);
  EXPECT_EQ(Summarize(size), r.avg_set_size);
  EXPECT_EQ(Summarize(loss), r.final_train_loss);
}

TEST(ExportTest, FilesAreByteStableAndJsonMirrorsReport) {
  ExperimentConfig c = SmallConfig();
  c.mode = AlphaMode::kShared;
  const std::vector<ExperimentReport> reports{RunCell(c, Xor70())};
  const auto dir = std::filesystem::temp_directory_path() / "adaptact_export_test";
  std::filesystem::remove_all(dir);
  const auto csv_paths = Export(reports, ExportFormat::kCsv, dir);
  EXPECT_EQ(csv_paths.size(), 3u);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string first = slurp(dir / "metrics.csv");
  Export(reports, ExportFormat::kCsv, dir);
  EXPECT_EQ(first, slurp(dir / "metrics.csv"));
  EXPECT_EQ(first, MetricsCsv(reports));

  Export(reports, ExportFormat::kJson, dir);
  const auto json = nlohmann::json::parse(slurp(dir / "report.json"));
  const auto& cell = json["reports"][0];
  EXPECT_EQ(cell["config"]["mode"], "m2");
  EXPECT_EQ(cell["config"]["epochs"], 30);
  EXPECT_EQ(cell["splits"].size(), 4u);
  EXPECT_EQ(cell["splits"][2]["accuracy"].get<double>(), reports[0].splits[2].accuracy);
  EXPECT_EQ(cell["summary"]["accuracy"]["median"].get<double>(),
            reports[0].accuracy.median);
  std::filesystem::remove_all(dir);
}

TEST(ExportTest, UnwritableDirectoryThrows) {
  const auto file = std::filesystem::temp_directory_path() / "adaptact_not_a_dir";
  { std::ofstream(file) << "x"; }
  const std::vector<ExperimentReport> none;
  EXPECT_THROW(Export(none, ExportFormat::kCsv, file / "sub"), std::runtime_error);
  std::filesystem::remove(file);
  EXPECT_THROW(ParseExportFormat("xml"), std::invalid_argument);
}

TEST(AlphaHistogramTest, PoolsEveryUnitOfEverySplit) {
  ExperimentConfig c = SmallConfig();
  c.n_splits = 20;
  c.mode = AlphaMode::kIndividual;
  const ExperimentReport r = RunCell(c, Xor70());
  EXPECT_EQ(PooledAlphas(r).size(), 40u);
  const Histogram h = AlphaHistogram(r);
  EXPECT_EQ(h.counts.size(), 20u);
  EXPECT_EQ(h.edges.size(), 21u);
  EXPECT_EQ(h.total(), 40u);
  EXPECT_TRUE(std::is_sorted(h.edges.begin(), h.edges.end()));
}

TEST(AlphaHistogramTest, IdenticalAlphasFillOneBin) {
  ExperimentReport r;
  r.config.mode = AlphaMode::kIndividual;
  for (std::size_t s = 0; s < 5; ++s) {
    SplitResult split;
    split.split_index = s;
    split.learned_alphas = {1.25, 1.25};
    r.splits.push_back(split);
  }
  const Histogram h = AlphaHistogram(r);
  EXPECT_EQ(h.total(), 10u);
  EXPECT_EQ(std::count_if(h.counts.begin(), h.counts.end(),
                          [](std::size_t c) { return c > 0; }),
            1);
  EXPECT_EQ(h.edges.front(), 0.75);
  EXPECT_EQ(h.edges.back(), 1.75);
}

TEST(AlphaHistogramTest, RejectsOtherModes) {
  ExperimentReport r;
  r.config.mode = AlphaMode::kShared;
  EXPECT_THROW(AlphaHistogram(r), std::invalid_argument);
}

TEST(NhSweepTest, TwelveReportsOnPairedSplits) {
  ExperimentConfig base = SmallConfig();
  base.n_splits = 2;
  const auto reports = NhSweep(base, Xor70());
  ASSERT_EQ(reports.size(), 12u);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    EXPECT_EQ(reports[i].config.hidden_units, kDefaultSweepValues[i / 3]);
    EXPECT_EQ(reports[i].config.mode, kAllModes[i % 3]);
    EXPECT_EQ(CellSplit(reports[i].config, 70, 1), CellSplit(base, 70, 1));
  }
}

TEST(NhSweepTest, ParamCountGrowsLinearlyInHiddenUnits) {
  for (AlphaMode mode : kAllModes) {
    std::vector<std::size_t> counts;
    for (std::size_t nh : kDefaultSweepValues) {
      counts.push_back(ParamCount(NetworkSpec{11, nh, 2, ActivationKind::kElu, mode}));
    }
    const std::size_t step = counts[1] - counts[0];
    for (std::size_t i = 1; i < counts.size(); ++i) {
      EXPECT_EQ(counts[i] - counts[i - 1], step);
    }
    // Two extra hidden units add 2(D + 1) + 2C weights, plus 2 alphas in m3.
    EXPECT_EQ(step, 2 * 12 + 2 * 2 + (mode == AlphaMode::kIndividual ? 2u : 0u));
  }
}

}  // namespace
}  // namespace adaptact
