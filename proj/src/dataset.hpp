#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "types.hpp"

namespace igmd {

/// Label column selector: a header name or a 0-based column index.
struct ColumnRef {
  std::variant<std::string, std::size_t> ref;

  static ColumnRef name(std::string n) { return {std::move(n)}; }
  static ColumnRef index(std::size_t i) { return {i}; }

  /// Parses a CLI-style selector: a header name, or a 0-based index when the
  /// text is all digits and no header column carries that exact name.
  static ColumnRef parse(const std::string& text);

  std::string describe() const;
};

struct RawRow {
  std::vector<AttributeValue> values;  // feature cells, label column excluded
  std::string label_cell;              // label cell kept verbatim (trimmed)
};

struct RawDataset {
  std::vector<std::string> attribute_names;  // feature columns only
  std::string label_name;                    // header name or "col<i>"
  std::size_t label_column = 0;              // index within the source file
  std::vector<RawRow> rows;
};

/// Loads a comma-delimited file. Cells equal to "NaN" or empty are Missing,
/// finite decimal numbers are Numeric, everything else Categorical. Without a
/// header, columns are named col0..colN-1 and the label must be given by
/// index.
RawDataset load_csv(const std::string& path, const ColumnRef& label_column,
                    bool has_header);

/// Instances whose label cell equals normal_label (exact, case-sensitive) get
/// Normal; all others get Anomalous. Zero Normal rows is legal but warned.
std::vector<Instance> binarize_labels(const RawDataset& raw,
                                      const std::string& normal_label,
                                      Warnings* warnings = nullptr);

struct NumericStats {
  double mean = 0.0;
  double stddev = 0.0;  // population formula (divide by n)
  std::size_t count = 0;
};

/// Per-attribute training statistics; attributes with no numeric values have
/// absent stats.
class AttributeStatsTable {
 public:
  AttributeStatsTable() = default;
  explicit AttributeStatsTable(std::vector<std::optional<NumericStats>> per_attr)
      : per_attribute_(std::move(per_attr)) {}

  std::size_t size() const { return per_attribute_.size(); }
  const std::optional<NumericStats>& at(std::size_t column) const {
    return per_attribute_[column];
  }
  const std::vector<std::optional<NumericStats>>& all() const {
    return per_attribute_;
  }

 private:
  std::vector<std::optional<NumericStats>> per_attribute_;
};

/// mu/sigma over the numeric, non-missing training values of both classes.
AttributeStatsTable compute_stats(std::span<const Instance> train);

struct SplitResult {
  std::vector<Instance> train;
  std::vector<Instance> test;
};

/// Stratified split: each class is shuffled with a seeded Fisher-Yates pass
/// (mt19937_64, so the outcome is identical on every platform) and cut at
/// round-half-up(class_size * train_fraction). Both halves come back sorted
/// by instance id. Refuses classes with fewer than 2 members.
SplitResult split(std::span<const Instance> instances, double train_fraction,
                  std::uint64_t seed);

}  // namespace igmd
