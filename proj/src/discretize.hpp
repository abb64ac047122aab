#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dataset.hpp"
#include "types.hpp"

namespace igmd {

/// Precision tags: a non-negative value is a decimal-place level, the two
/// sentinels mark categorical and missing symbols (which are replicated into
/// every precision layer).
constexpr std::int32_t kCategoricalTag = -1;
constexpr std::int32_t kMissingTag = -2;

std::string tag_to_string(std::int32_t tag);
std::int32_t tag_from_string(const std::string& text);

/// Decimal places at which z-scores are rounded; one granularity layer per
/// level.
struct PrecisionSet {
  std::vector<int> levels;

  /// Parses a comma list such as "0,1". Levels must be non-negative, strictly
  /// increasing, and at most 12 (the fixed-point renderer's int64 range).
  static PrecisionSet parse(const std::string& text);

  std::size_t layer_count() const { return levels.size(); }
  std::string to_string() const;
  bool operator==(const PrecisionSet&) const = default;
};

/// One discretized feature code. Equality is over all four fields; numeric
/// codes are canonical fixed-point text (exactly p decimals, never "-0").
struct Symbol {
  std::uint32_t column = 0;
  std::string attribute;
  std::int32_t tag = kMissingTag;
  std::string code;

  bool operator==(const Symbol& o) const {
    return column == o.column && tag == o.tag && code == o.code &&
           attribute == o.attribute;
  }
};

/// Canonical symbol order: column, then tag, then code bytes.
inline bool canonical_less(const Symbol& a, const Symbol& b) {
  if (a.column != b.column) return a.column < b.column;
  if (a.tag != b.tag) return a.tag < b.tag;
  return a.code < b.code;
}

using SymbolId = std::uint32_t;
using SymbolSet = std::vector<SymbolId>;  // strictly increasing ids

struct SymbolSetHash {
  std::size_t operator()(const SymbolSet& v) const {
    std::size_t h = 1469598103934665603ULL;
    for (SymbolId id : v) {
      h ^= id;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

/// Interning table mapping Symbols to dense ids. After finalize() the id
/// order equals the canonical symbol order, so sorted id vectors are
/// canonically sorted symbol sets.
class SymbolTable {
 public:
  SymbolId intern(Symbol s);
  /// Lookup without insertion; returns false when the symbol is unknown.
  bool find(const Symbol& s, SymbolId& out) const;

  const Symbol& at(SymbolId id) const { return symbols_[id]; }
  std::size_t size() const { return symbols_.size(); }

  /// Renumbers ids into canonical order and returns the old->new mapping.
  std::vector<SymbolId> finalize();

 private:
  struct Key {
    std::uint32_t column;
    std::int32_t tag;
    std::string code;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::vector<Symbol> symbols_;
  std::unordered_map<Key, SymbolId, KeyHash> index_;
};

/// An instance mapped to one symbol set per precision layer plus the merged
/// union used for contradiction checks.
struct SymbolicInstance {
  std::size_t id = 0;
  Label label = Label::Normal;
  std::vector<SymbolSet> layers;  // one per precision level, sorted ids
  SymbolSet merged;               // union of all layers, sorted ids
};

/// (v - mu) / sigma; 0 when sigma is 0 (a constant attribute carries no
/// discriminative information).
double zscore(double v, const NumericStats& stats);

/// Canonical fixed-point rendering of z rounded half-to-even at p decimal
/// places: exactly p decimals, integer text at p=0, no "-0".
std::string render_code(double z, int p);

/// Maps one cell to its Symbol at level p. Numeric values for attributes with
/// absent stats degrade to the Missing symbol.
Symbol discretize_value(const AttributeValue& value, std::uint32_t column,
                        const std::string& attribute,
                        const std::optional<NumericStats>& stats, int p);

/// Builds all layers of an instance, interning new symbols into the table.
SymbolicInstance discretize_instance(const Instance& inst,
                                     std::span<const std::string> attribute_names,
                                     const AttributeStatsTable& stats,
                                     const PrecisionSet& precisions,
                                     SymbolTable& table);

/// Discretizes against a frozen table (inference path). Symbols the table has
/// never seen are dropped from the layer sets: they cannot participate in any
/// stored pattern.
SymbolicInstance discretize_instance_frozen(const Instance& inst,
                                            std::span<const std::string> attribute_names,
                                            const AttributeStatsTable& stats,
                                            const PrecisionSet& precisions,
                                            const SymbolTable& table);

/// Applies a SymbolTable::finalize() mapping to an instance's sets and
/// restores id order.
void remap_instance(SymbolicInstance& si, const std::vector<SymbolId>& old_to_new);

struct FilterResult {
  std::vector<SymbolicInstance> kept;   // input order preserved
  std::vector<std::size_t> removed_ids; // instance ids, input order
};

/// Groups training instances by their merged symbol set and drops every group
/// that carries both labels.
FilterResult anti_contradiction_filter(std::vector<SymbolicInstance> train,
                                       Warnings* warnings = nullptr);

}  // namespace igmd
