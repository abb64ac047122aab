#pragma once

#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace igmd {

struct MatchedPattern {
  std::uint32_t pattern_id = 0;     // position in store.patterns()
  std::uint64_t contribution = 0;   // freq * |q|^2
};

/// NS/AS for one instance plus the patterns that produced them. The scores
/// equal the sums of the listed contributions exactly.
struct ScorePair {
  std::uint64_t ns = 0;
  std::uint64_t as = 0;
  std::vector<MatchedPattern> matched_normal;
  std::vector<MatchedPattern> matched_anomalous;
};

/// Accumulates freq * |q|^2 over every stored pattern contained in the
/// instance's layer set, across all precision layers. The instance must have
/// been discretized with the model's precision set.
ScorePair score(const SymbolicInstance& t, const Model& model,
                bool collect_matches = true);

/// Population mean/std of NS over the post-filter Normal training instances.
/// Instances are scored concurrently; the result does not depend on the
/// worker count.
GuardBand calibrate_guard_band(std::span<const SymbolicInstance> normal_train,
                               const Model& model, double r,
                               Warnings* warnings = nullptr,
                               unsigned threads = 0);

enum class Rule : std::uint8_t {
  ScoreDominance,
  DoubleZero,
  StatisticalDeviation,
  NormalDefault,
};

const char* rule_name(Rule r);

struct Verdict {
  Label label = Label::Normal;
  Rule rule = Rule::NormalDefault;
  ScorePair scores;
};

/// The three decision rules. Label outcome is order-independent; attribution
/// distinguishes "no evidence at all" (DoubleZero) from dominated evidence.
Verdict classify(ScorePair sp, const GuardBand& gb);

/// Ranking statistic for threshold-free evaluation: AS - NS, higher = more
/// anomalous.
std::int64_t ranking_score(const ScorePair& sp);

/// Plain-text audit report: fired rule, both scores, guard-band threshold,
/// and every matched pattern with attribute names and codes, sorted by
/// contribution descending.
std::string explain(const Verdict& verdict, const Model& model,
                    std::size_t instance_id);

}  // namespace igmd
