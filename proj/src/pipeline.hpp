#pragma once

#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "score.hpp"

namespace igmd {

/// Dataset-level context the trained model inherits.
struct DatasetSchema {
  std::vector<std::string> attribute_names;
  std::string label_name;
  std::size_t label_column = 0;
  std::string normal_label = "Normal";
  std::string source;  // path as given on the command line
};

struct TrainConfig {
  PrecisionSet precisions;
  double r = 3.0;
  unsigned threads = 0;
};

/// Full training pass: stats -> discretize -> anti-contradiction -> mine ->
/// guard-band calibration.
Model train_model(std::span<const Instance> train, const DatasetSchema& schema,
                  const TrainConfig& config, Warnings* warnings = nullptr);

/// Discretizes one unseen record against the model and classifies it.
Verdict classify_instance(const Instance& inst, const Model& model,
                          bool collect_matches = true);

/// Classifies a batch concurrently; match lists are skipped for throughput.
/// Output order and content do not depend on the worker count.
std::vector<Verdict> classify_all(std::span<const Instance> instances,
                                  const Model& model, unsigned threads = 0);

/// Loads a CSV against the model's schema. The file may carry the label
/// column (its values are ignored) or omit it; attribute names and order must
/// match or the first offending column is reported. Returned labels are
/// placeholders.
std::vector<Instance> load_for_model(const std::string& path, bool has_header,
                                     const Model& model);

/// Verdict CSV with provenance header: id,label,rule,ns,as,ranking_score.
std::string render_verdicts_csv(std::span<const Verdict> verdicts,
                                const Model& model, std::uint32_t model_crc,
                                const std::string& data_path);

/// Human-readable pattern-pool and guard-band summary.
std::string model_summary(const Model& model, std::uint32_t model_crc);

}  // namespace igmd
