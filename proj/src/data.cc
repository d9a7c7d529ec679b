#include "adaptact/data.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace adaptact {

void Dataset::Validate() const {
  const std::size_t n = labels.size();
  if (n < 2) throw std::invalid_argument("dataset needs at least 2 rows");
  if (feature_names.empty()) throw std::invalid_argument("dataset has no features");
  if (features.size() != n * dim()) {
    throw std::invalid_argument("feature matrix does not match N x D");
  }
  if (class_names.size() < 2) {
    throw std::invalid_argument("dataset needs at least 2 classes");
  }
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_names.size()) {
      throw std::invalid_argument("label " + std::to_string(y) + " out of range");
    }
    ++counts[y];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw std::invalid_argument("class '" + class_names[c] + "' has no rows");
    }
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
  }
}

Dataset Subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.class_names = data.class_names;
  out.features.reserve(indices.size() * data.dim());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= data.size()) throw std::out_of_range("subset index out of range");
    const auto r = data.row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> SplitFields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> ParseNumber(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string Where(std::size_t line_no, const std::string& column) {
  return "line " + std::to_string(line_no) + ", column '" + column + "'";
}

}  // namespace

Dataset ParseCsv(std::string_view text, std::string_view label_column) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (Trim(line).empty()) continue;
    if (header.empty()) {
      header = SplitFields(line);
      continue;
    }
    rows.push_back(SplitFields(line));
    line_numbers.push_back(line_no);
    if (rows.back().size() != header.size()) {
      throw CsvError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(header.size()) + " fields, found " +
                     std::to_string(rows.back().size()));
    }
  }
  if (header.empty()) throw CsvError("missing header row");

  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw CsvError("label column '" + std::string(label_column) +
                   "' not found in header");
  }
  const std::size_t label_col =
      static_cast<std::size_t>(label_it - header.begin());
  if (rows.empty()) throw CsvError("no data rows");

  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (rows[r][c].empty()) {
        throw CsvError(Where(line_numbers[r], header[c]) + ": missing value");
      }
    }
  }

  // A column is numeric iff its first data cell parses as a number.
  std::vector<std::size_t> numeric_cols;
  std::vector<std::size_t> categorical_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col) continue;
    if (ParseNumber(rows[0][c])) {
      numeric_cols.push_back(c);
    } else {
      categorical_cols.push_back(c);
    }
  }

  std::vector<std::set<std::string>> categories(categorical_cols.size());
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < categorical_cols.size(); ++k) {
      categories[k].insert(row[categorical_cols[k]]);
    }
  }

  Dataset data;
  for (std::size_t c : numeric_cols) data.feature_names.push_back(header[c]);
  for (std::size_t k = 0; k < categorical_cols.size(); ++k) {
    for (const std::string& cat : categories[k]) {
      data.feature_names.push_back(header[categorical_cols[k]] + "=" + cat);
    }
  }
  if (data.feature_names.empty()) throw CsvError("no feature columns");

  std::set<std::string> class_set;
  for (const auto& row : rows) class_set.insert(row[label_col]);
  data.class_names.assign(class_set.begin(), class_set.end());
  if (data.class_names.size() < 2) {
    throw CsvError("label column '" + std::string(label_column) +
                   "' has a single class '" + data.class_names.front() + "'");
  }

  data.features.reserve(rows.size() * data.feature_names.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    for (std::size_t c : numeric_cols) {
      const std::optional<double> v = ParseNumber(row[c]);
      if (!v) {
        throw CsvError(Where(line_numbers[r], header[c]) +
                       ": cannot parse '" + row[c] + "' as a number");
      }
      data.features.push_back(*v);
    }
    for (std::size_t k = 0; k < categorical_cols.size(); ++k) {
      const std::string& value = row[categorical_cols[k]];
      for (const std::string& cat : categories[k]) {
        data.features.push_back(cat == value ? 1.0 : 0.0);
      }
    }
    const auto cls = std::lower_bound(data.class_names.begin(),
                                      data.class_names.end(), row[label_col]);
    data.labels.push_back(static_cast<int>(cls - data.class_names.begin()));
  }
  if (data.size() < 2) throw CsvError("dataset needs at least 2 rows");
  return data;
}

Dataset LoadCsv(const std::filesystem::path& path,
                std::string_view label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseCsv(buffer.str(), label_column);
  } catch (const CsvError& e) {
    throw CsvError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Splits

std::uint64_t SplitSeed(std::uint64_t master_seed, std::size_t split_index) {
  const auto index = static_cast<std::uint64_t>(split_index);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(std::begin(out), std::end(out));
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

SplitIndices MakeSplit(std::size_t n, const SplitPlan& plan,
                       std::size_t split_index) {
  if (split_index >= plan.n_splits) {
    throw std::invalid_argument("split index " + std::to_string(split_index) +
                                " >= n_splits " +
                                std::to_string(plan.n_splits));
  }
  if (!(plan.test_fraction > 0.0 && plan.test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(plan.test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) {
    throw std::invalid_argument("split of " + std::to_string(n) +
                                " rows with test fraction " +
                                std::to_string(plan.test_fraction) +
                                " leaves an empty side");
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(SplitSeed(plan.seed, split_index));
  std::shuffle(perm.begin(), perm.end(), rng);

  SplitIndices out;
  out.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

TrainTest Split(const Dataset& data, const SplitPlan& plan,
                std::size_t split_index) {
  const SplitIndices idx = MakeSplit(data.size(), plan, split_index);
  return {Subset(data, idx.train), Subset(data, idx.test)};
}

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::Fit(const Dataset& train) {
  if (train.size() == 0) throw std::invalid_argument("cannot fit on empty data");
  const std::size_t d = train.dim();
  const double n = static_cast<double>(train.size());
  Standardizer s;
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += train.row(i)[j];
  }
  for (double& m : s.mean_) m /= n;
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = train.row(i)[j] - s.mean_[j];
      s.scale_[j] += diff * diff;
    }
  }
  for (double& v : s.scale_) {
    v = std::sqrt(v / n);
    if (!(v > 0.0)) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::Apply(std::span<const double> features) const {
  const std::size_t d = mean_.size();
  if (d == 0 || features.size() % d != 0) {
    throw std::invalid_argument("feature matrix width does not match standardizer");
  }
  std::vector<double> out(features.begin(), features.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::size_t j = k % d;
    out[k] = (out[k] - mean_[j]) / scale_[j];
  }
  return out;
}

Dataset Standardizer::Apply(const Dataset& data) const {
  Dataset out = data;
  out.features = Apply(data.features);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

SyntheticKind ParseSyntheticKind(std::string_view name) {
  if (name == "xor2d") return SyntheticKind::kXor2d;
  if (name == "blobs3") return SyntheticKind::kBlobs3;
  if (name == "ring2d") return SyntheticKind::kRing2d;
  throw std::invalid_argument("unknown synthetic dataset '" + std::string(name) +
                              "' (expected xor2d, blobs3 or ring2d)");
}

std::string ToString(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kXor2d:
      return "xor2d";
    case SyntheticKind::kBlobs3:
      return "blobs3";
    case SyntheticKind::kRing2d:
      return "ring2d";
  }
  return "unknown";
}

Dataset MakeSynthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 20) throw std::invalid_argument("synthetic datasets need n >= 20");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset data;
  data.feature_names = {"x0", "x1"};
  const std::size_t classes = kind == SyntheticKind::kBlobs3 ? 3 : 2;
  for (std::size_t c = 0; c < classes; ++c) {
    data.class_names.push_back("c" + std::to_string(c));
  }
  data.features.reserve(2 * n);
  data.labels.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % classes);
    double x = 0.0;
    double y = 0.0;
    switch (kind) {
      case SyntheticKind::kXor2d: {
        // Class 0 in quadrants I/III, class 1 in II/IV.
        const double sx = unit(rng) < 0.5 ? -1.0 : 1.0;
        const double sy = label == 0 ? sx : -sx;
        x = sx * unit(rng);
        y = sy * unit(rng);
        break;
      }
      case SyntheticKind::kBlobs3: {
        const double angle = 2.0 * std::numbers::pi * label / 3.0;
        x = 2.0 * std::cos(angle) + gauss(rng);
        y = 2.0 * std::sin(angle) + gauss(rng);
        break;
      }
      case SyntheticKind::kRing2d: {
        const double r = label == 0 ? unit(rng) : 1.5 + unit(rng);
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        x = r * std::cos(angle) + 0.1 * gauss(rng);
        y = r * std::sin(angle) + 0.1 * gauss(rng);
        break;
      }
    }
    data.features.push_back(x);
    data.features.push_back(y);
    data.labels.push_back(label);
  }
  return data;
}

}  // namespace adaptact
