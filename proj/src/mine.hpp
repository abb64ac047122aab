#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "discretize.hpp"

namespace igmd {

/// A coherent pattern: a symbol set from one precision layer, unique to one
/// class, with its training frequency. freq >= 2 by construction (every
/// pattern arises from a pairwise intersection).
struct Pattern {
  SymbolSet symbols;  // sorted canonical ids
  Label cls = Label::Normal;
  int layer = 0;  // precision level p ("cat"/"nan" symbols ride along per layer)
  std::uint32_t freq = 0;

  std::uint32_t length() const { return static_cast<std::uint32_t>(symbols.size()); }
  /// Eq-style contribution freq * |q|^2, exact in integer arithmetic.
  std::uint64_t weight() const {
    return std::uint64_t(freq) * length() * length();
  }
};

/// The trained pattern collections: per-layer CNP/CAP plus an inverted index
/// from symbol to the patterns containing it. Immutable once built.
///
/// Patterns are stored sorted by (layer index, class, symbols), so a pattern
/// id alone encodes its layer and class as a position; the flat length and
/// weight arrays keep the scoring hot loop off the pattern structs.
class PatternStore {
 public:
  PatternStore() = default;
  PatternStore(std::vector<Pattern> patterns, const PrecisionSet& precisions,
               std::size_t symbol_count);

  const std::vector<Pattern>& patterns() const { return patterns_; }
  std::span<const Pattern> layer_class(std::size_t layer_index, Label cls) const;
  /// Ids (positions in patterns()) of the patterns containing this symbol,
  /// ascending.
  const std::vector<std::uint32_t>& postings(SymbolId s) const;
  std::size_t layer_count() const { return ranges_.size() / 2; }

  /// [begin, end) of the pattern ids in one layer (both classes).
  std::pair<std::uint32_t, std::uint32_t> layer_range(std::size_t layer_index) const {
    return {ranges_[2 * layer_index].first, ranges_[2 * layer_index + 1].second};
  }
  /// Ids below this bound within the layer are Normal patterns.
  std::uint32_t normal_end(std::size_t layer_index) const {
    return ranges_[2 * layer_index].second;
  }
  std::uint32_t length_of(std::uint32_t qid) const { return lengths_[qid]; }
  std::uint64_t weight_of(std::uint32_t qid) const { return weights_[qid]; }
  std::size_t symbol_count() const { return index_.size(); }

  /// Symbols of pattern qid as a flat slice (for sequential scans).
  std::span<const SymbolId> flat_symbols(std::uint32_t qid) const {
    return {flat_symbols_.data() + flat_offsets_[qid],
            flat_symbols_.data() + flat_offsets_[qid + 1]};
  }

 private:
  std::vector<Pattern> patterns_;  // sorted by (layer index, class, symbols)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges_;  // [2*li + cls]
  std::vector<std::vector<std::uint32_t>> index_;                // per symbol id
  std::vector<std::uint32_t> lengths_;                           // per pattern
  std::vector<std::uint64_t> weights_;                           // freq * len^2
  std::vector<std::uint32_t> flat_offsets_;                      // n+1 entries
  std::vector<SymbolId> flat_symbols_;
  static const std::vector<std::uint32_t> kEmptyPostings;
};

/// All pairwise intersections of the instances' layer sets, empty ones
/// dropped, deduplicated, in canonical (lexicographic id) order.
std::vector<SymbolSet> mine_candidates(std::span<const SymbolicInstance> class_instances,
                                       std::size_t layer_index,
                                       Warnings* warnings = nullptr,
                                       unsigned threads = 0);

/// Keeps the candidates contained in no opposite-class instance's layer set.
std::vector<SymbolSet> coherence_filter(std::vector<SymbolSet> candidates,
                                        std::span<const SymbolicInstance> opposite_instances,
                                        std::size_t layer_index);

/// Number of same-class instances whose layer set contains the pattern.
std::uint32_t count_frequency(const SymbolSet& pattern,
                              std::span<const SymbolicInstance> class_instances,
                              std::size_t layer_index);

/// Mines every layer independently over the filtered training instances and
/// assembles the store. Byte-identical output for any worker count.
PatternStore build_store(std::span<const SymbolicInstance> train,
                         const PrecisionSet& precisions, std::size_t symbol_count,
                         Warnings* warnings = nullptr, unsigned threads = 0);

/// a subset-of b for sorted id vectors.
inline bool is_subset(const SymbolSet& a, const SymbolSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace igmd
