#ifndef ADAPTACT_DATA_H_
#define ADAPTACT_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adaptact/network.h"

namespace adaptact {

// Labeled tabular data; features are row-major N x D.
struct Dataset {
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return feature_names.size(); }
  std::size_t num_classes() const { return class_names.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim(), dim());
  }
  BatchView view() const { return {features, labels, dim()}; }

  // Throws std::invalid_argument when shapes disagree, a label is out of
  // range, any feature is non-finite, N < 2 or a class has no rows.
  void Validate() const;
};

// Rows of `data` at `indices`, in that order. Class metadata is kept even if
// a class ends up absent from the subset.
Dataset Subset(const Dataset& data, std::span<const std::size_t> indices);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a comma-separated file with a header row. Columns whose first data
// cell is numeric must be numeric throughout; other columns are treated as
// categorical and one-hot encoded (sorted category names) after the numeric
// features. The label column is mapped to indices by sorted class name.
Dataset LoadCsv(const std::filesystem::path& path,
                std::string_view label_column = "label");
Dataset ParseCsv(std::string_view text, std::string_view label_column = "label");

struct SplitPlan {
  std::uint64_t seed = 0;
  double test_fraction = 0.3;
  std::size_t n_splits = 20;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  bool operator==(const SplitIndices&) const = default;
};

// Seed for split `split_index`, hashed from the master seed so each split
// can be regenerated independently.
std::uint64_t SplitSeed(std::uint64_t master_seed, std::size_t split_index);

// Uniformly random partition with round(test_fraction * n) test rows. Throws
// if split_index >= n_splits or either side would be empty.
SplitIndices MakeSplit(std::size_t n, const SplitPlan& plan,
                       std::size_t split_index);

struct TrainTest {
  Dataset train;
  Dataset test;
};
TrainTest Split(const Dataset& data, const SplitPlan& plan,
                std::size_t split_index);

// Per-feature affine transform fitted on training rows only. Uses the
// population standard deviation; constant columns get divisor 1.
class Standardizer {
 public:
  static Standardizer Fit(const Dataset& train);

  std::vector<double> Apply(std::span<const double> features) const;
  Dataset Apply(const Dataset& data) const;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

enum class SyntheticKind {
  kXor2d,   // two classes by quadrant parity; not linearly separable
  kBlobs3,  // three overlapping isotropic Gaussian clusters
  kRing2d,  // disc vs surrounding annulus
};

SyntheticKind ParseSyntheticKind(std::string_view name);
std::string ToString(SyntheticKind kind);

// Deterministic in (kind, n, seed); class sizes differ by at most one.
// Requires n >= 20.
Dataset MakeSynthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed);

}  // namespace adaptact

#endif  // ADAPTACT_DATA_H_
