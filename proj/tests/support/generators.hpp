#pragma once

// Deterministic dataset builders shared by the unit and acceptance suites.

#include <random>
#include <span>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace igmd::testing {

inline std::vector<std::string> attr_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back("a" + std::to_string(i));
  return names;
}

inline DatasetSchema schema_for(std::size_t n_attrs,
                                const std::string& source = "synthetic") {
  DatasetSchema s;
  s.attribute_names = attr_names(n_attrs);
  s.label_name = "label";
  s.label_column = n_attrs;
  s.normal_label = "Normal";
  s.source = source;
  return s;
}

/// Labeled instances with small per-attribute value pools so codes collide
/// across instances and classes; ~15% categorical cells, ~10% missing.
inline std::vector<Instance> random_instances(std::mt19937_64& gen, std::size_t n,
                                              std::size_t n_attrs) {
  static const char* cats[] = {"tcp", "udp", "icmp"};
  std::vector<Instance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Instance inst;
    inst.id = i;
    inst.label = (gen() % 2 == 0) ? Label::Normal : Label::Anomalous;
    inst.values.reserve(n_attrs);
    for (std::size_t c = 0; c < n_attrs; ++c) {
      std::uint64_t roll = gen() % 20;
      if (roll < 2) {
        inst.values.push_back(AttributeValue::missing());
      } else if (roll < 5) {
        inst.values.push_back(AttributeValue::categorical(cats[gen() % 3]));
      } else {
        // multiples of 0.25 in [0,1]: distinguishable at p=1, colliding at p=0
        inst.values.push_back(AttributeValue::numeric(double(gen() % 5) * 0.25));
      }
    }
    out.push_back(std::move(inst));
  }
  return out;
}

/// The discretization front half shared by mining tests: stats ->
/// symbolization -> canonical ids -> anti-contradiction filter.
struct Discretized {
  AttributeStatsTable stats;
  SymbolTable table;
  std::vector<SymbolicInstance> kept;
  std::size_t removed = 0;
};

inline Discretized discretize_train(std::span<const Instance> train,
                                    const PrecisionSet& precisions) {
  Discretized d;
  d.stats = compute_stats(train);
  auto names = attr_names(train.empty() ? 0 : train.front().values.size());
  std::vector<SymbolicInstance> symbolic;
  symbolic.reserve(train.size());
  for (const Instance& inst : train) {
    symbolic.push_back(
        discretize_instance(inst, names, d.stats, precisions, d.table));
  }
  auto old_to_new = d.table.finalize();
  for (auto& si : symbolic) remap_instance(si, old_to_new);
  FilterResult fr = anti_contradiction_filter(std::move(symbolic));
  d.kept = std::move(fr.kept);
  d.removed = fr.removed_ids.size();
  return d;
}

/// Two numeric attributes and one categorical, all perfectly class-separated.
inline std::vector<Instance> separable_instances(std::size_t per_class) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    bool normal = i % 2 == 0;
    Instance inst;
    inst.id = i;
    inst.label = normal ? Label::Normal : Label::Anomalous;
    inst.values = {AttributeValue::numeric(normal ? 1.0 : 7.0),
                   AttributeValue::numeric(normal ? 2.0 : 8.0),
                   AttributeValue::categorical(normal ? "tcp" : "udp")};
    out.push_back(std::move(inst));
  }
  return out;
}

/// Classes that differ only in the first decimal of one attribute's z-score:
/// raw values are symmetric, so training z-codes are identical per class at
/// p=0 and disjoint between classes at p=1.
struct FirstDecimalData {
  std::vector<Instance> train;
  std::vector<Instance> test;
};

inline FirstDecimalData first_decimal_dataset(std::size_t train_copies = 5,
                                              std::size_t test_copies = 3) {
  static const double kNormalValues[] = {-1.2, -0.4, 0.4, 1.2};
  static const double kAnomalousValues[] = {-1.4, -0.2, 0.2, 1.4};
  FirstDecimalData data;
  std::size_t id = 0;
  auto emit = [&](std::vector<Instance>& dest, std::size_t copies) {
    for (std::size_t k = 0; k < copies; ++k) {
      for (double v : kNormalValues) {
        Instance inst;
        inst.id = id++;
        inst.label = Label::Normal;
        inst.values = {AttributeValue::numeric(v),
                       AttributeValue::categorical("tcp")};
        dest.push_back(std::move(inst));
      }
      for (double v : kAnomalousValues) {
        Instance inst;
        inst.id = id++;
        inst.label = Label::Anomalous;
        inst.values = {AttributeValue::numeric(v),
                       AttributeValue::categorical("tcp")};
        dest.push_back(std::move(inst));
      }
    }
  };
  emit(data.train, train_copies);
  emit(data.test, test_copies);
  return data;
}

}  // namespace igmd::testing
