#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "discretize.hpp"
#include "mine.hpp"

namespace igmd {

/// Statistical-deviation threshold mu_N - r * sigma_N, calibrated over the
/// normal training instances' NS values. Disabled when there were none.
struct GuardBand {
  bool enabled = false;
  double mu_n = 0.0;
  double sigma_n = 0.0;  // population formula
  double r = 3.0;

  double threshold() const {
    if (!enabled) return -std::numeric_limits<double>::infinity();
    return mu_n - r * sigma_n;
  }
};

/// Everything a trained detector owns: the schema needed to discretize unseen
/// records, the per-layer pattern collections, and the guard band. Treated as
/// immutable once trained or loaded.
struct Model {
  static constexpr int kFormatVersion = 1;

  // schema
  std::vector<std::string> attribute_names;
  std::string label_name;
  std::size_t label_column = 0;
  std::string normal_label = "Normal";

  // discretization
  PrecisionSet precisions;
  AttributeStatsTable stats;
  SymbolTable symbols;

  // patterns + decision rule parameters
  PatternStore store;
  GuardBand guard_band;

  // training provenance
  std::string source;  // data path as given on the command line
  std::size_t train_normal = 0;
  std::size_t train_anomalous = 0;
  std::size_t removed_contradictory = 0;

  std::size_t pattern_count(std::size_t layer_index, Label cls) const {
    return store.layer_class(layer_index, cls).size();
  }
};

}  // namespace igmd
