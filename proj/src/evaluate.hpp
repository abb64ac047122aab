#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace igmd {

/// Anomalous is the positive class throughout.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
};

Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted);

/// Undefined precision/recall (empty denominator) is reported absent rather
/// than coerced to 0 or 1, so degenerate splits stay visible.
struct Metrics {
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
};

Metrics metrics(const Confusion& c);

/// Mann-Whitney rank statistic: P(score_anomalous > score_normal) with ties
/// counted half. Absent when only one class is present.
std::optional<double> auc(std::span<const double> scores,
                          std::span<const Label> truth);

struct GridCell {
  int train_tenths = 0;  // the "k" of a k:(10-k) ratio
  std::uint32_t repeat = 0;
  std::uint64_t seed = 0;
  std::size_t train_normal = 0;
  std::size_t train_anomalous = 0;
  std::size_t test_normal = 0;
  std::size_t test_anomalous = 0;
  std::size_t removed = 0;
  std::vector<std::size_t> cnp_per_layer;
  std::vector<std::size_t> cap_per_layer;
  Metrics m;
  std::optional<double> auc_value;
};

struct GridReport {
  PrecisionSet precisions;
  double r = 3.0;
  std::uint64_t seed = 0;
  std::uint32_t repeats = 1;
  std::string source;
  std::string label_column;
  std::string normal_label;
  std::uint32_t data_checksum = 0;
  std::vector<GridCell> cells;  // ratio-major, repeats inner
};

/// Runs the full pipeline for each of the nine k:(10-k) splits; repeat j uses
/// seed + j. No state is shared across cells beyond the raw instances.
GridReport run_split_grid(std::span<const Instance> instances,
                          const DatasetSchema& schema, const PrecisionSet& precisions,
                          double r, std::uint64_t seed, std::uint32_t repeats = 1,
                          unsigned threads = 0);

/// Fixed-column CSV (documented in docs/FORMATS.md); byte-identical for
/// identical inputs.
std::string render_report_csv(const GridReport& report);

/// Human-readable table: Accuracy, Recall, Precision, AUC per ratio
/// (mean +- std when repeats > 1).
std::string render_report_table(const GridReport& report);

}  // namespace igmd
