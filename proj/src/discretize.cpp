#include "discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace igmd {

std::string tag_to_string(std::int32_t tag) {
  if (tag == kCategoricalTag) return "cat";
  if (tag == kMissingTag) return "nan";
  return std::to_string(tag);
}

std::int32_t tag_from_string(const std::string& text) {
  if (text == "cat") return kCategoricalTag;
  if (text == "nan") return kMissingTag;
  try {
    std::size_t pos = 0;
    int v = std::stoi(text, &pos);
    if (pos == text.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw_error(ErrorKind::Format, "invalid precision tag '" + text + "'");
}

PrecisionSet PrecisionSet::parse(const std::string& text) {
  PrecisionSet ps;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty())
      throw_error(ErrorKind::Usage, "empty entry in precision list '" + text + "'");
    std::size_t pos = 0;
    int level = -1;
    try {
      level = std::stoi(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || level < 0 || level > 12) {
      throw_error(ErrorKind::Usage, "precision level '" + item +
                                        "' is not an integer in [0,12]");
    }
    if (!ps.levels.empty() && level <= ps.levels.back()) {
      throw_error(ErrorKind::Usage,
                  "precision levels must be strictly increasing: '" + text + "'");
    }
    ps.levels.push_back(level);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (ps.levels.empty())
    throw_error(ErrorKind::Usage, "precision set must be non-empty");
  return ps;
}

std::string PrecisionSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(levels[i]);
  }
  return out;
}

std::size_t SymbolTable::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<std::string>()(k.code);
  h ^= (std::size_t(k.column) * 0x9e3779b97f4a7c15ULL) + (h << 6) + (h >> 2);
  h ^= (std::size_t(std::uint32_t(k.tag)) * 0xc2b2ae3d27d4eb4fULL) + (h << 6) + (h >> 2);
  return h;
}

SymbolId SymbolTable::intern(Symbol s) {
  Key key{s.column, s.tag, s.code};
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  index_.emplace(std::move(key), id);
  symbols_.push_back(std::move(s));
  return id;
}

bool SymbolTable::find(const Symbol& s, SymbolId& out) const {
  auto it = index_.find(Key{s.column, s.tag, s.code});
  if (it == index_.end()) return false;
  out = it->second;
  return true;
}

std::vector<SymbolId> SymbolTable::finalize() {
  std::vector<SymbolId> order(symbols_.size());
  for (SymbolId i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [this](SymbolId a, SymbolId b) {
    return canonical_less(symbols_[a], symbols_[b]);
  });
  std::vector<SymbolId> old_to_new(symbols_.size());
  std::vector<Symbol> reordered(symbols_.size());
  for (SymbolId pos = 0; pos < order.size(); ++pos) {
    old_to_new[order[pos]] = pos;
    reordered[pos] = std::move(symbols_[order[pos]]);
  }
  symbols_ = std::move(reordered);
  for (auto& [key, id] : index_) id = old_to_new[id];
  return old_to_new;
}

double zscore(double v, const NumericStats& stats) {
  if (stats.stddev == 0.0) return 0.0;
  return (v - stats.mean) / stats.stddev;
}

namespace {

constexpr double kPow10[13] = {1e0, 1e1, 1e2, 1e3,  1e4,  1e5, 1e6,
                               1e7, 1e8, 1e9, 1e10, 1e11, 1e12};

// Half-to-even without touching the fenv rounding mode. The fractional part
// of a double is exact, so the tie test is exact.
double round_half_even(double x) {
  double f = std::floor(x);
  double diff = x - f;
  if (diff > 0.5) return f + 1.0;
  if (diff < 0.5) return f;
  return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

}  // namespace

std::string render_code(double z, int p) {
  double scaled = z * kPow10[p];
  double rounded = round_half_even(scaled);
  if (std::abs(rounded) >= 9.0e18) {
    // Outliers beyond int64 range have no fractional digits left; fixed-point
    // printf is already canonical there.
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%.*f", p, z);
    return buf;
  }
  long long n = static_cast<long long>(rounded);
  if (p == 0) return std::to_string(n);
  long long pw = static_cast<long long>(kPow10[p]);
  unsigned long long a = n < 0 ? static_cast<unsigned long long>(-n)
                               : static_cast<unsigned long long>(n);
  std::string digits = std::to_string(a % static_cast<unsigned long long>(pw));
  std::string out;
  if (n < 0) out.push_back('-');  // n != 0 here, so never "-0.0..."
  out += std::to_string(a / static_cast<unsigned long long>(pw));
  out.push_back('.');
  out.append(static_cast<std::size_t>(p) - digits.size(), '0');
  out += digits;
  return out;
}

Symbol discretize_value(const AttributeValue& value, std::uint32_t column,
                        const std::string& attribute,
                        const std::optional<NumericStats>& stats, int p) {
  Symbol s;
  s.column = column;
  s.attribute = attribute;
  switch (value.kind) {
    case AttributeValue::Kind::Numeric:
      if (!stats) {  // no usable training statistics for this attribute
        s.tag = kMissingTag;
        s.code = "NaN";
      } else {
        s.tag = p;
        s.code = render_code(zscore(value.number, *stats), p);
      }
      break;
    case AttributeValue::Kind::Categorical:
      s.tag = kCategoricalTag;
      s.code = value.text;
      break;
    case AttributeValue::Kind::Missing:
      s.tag = kMissingTag;
      s.code = "NaN";
      break;
  }
  return s;
}

namespace {

void finish_sets(SymbolicInstance& si) {
  for (auto& layer : si.layers) std::sort(layer.begin(), layer.end());
  SymbolSet merged;
  for (const auto& layer : si.layers)
    merged.insert(merged.end(), layer.begin(), layer.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  si.merged = std::move(merged);
}

}  // namespace

SymbolicInstance discretize_instance(const Instance& inst,
                                     std::span<const std::string> attribute_names,
                                     const AttributeStatsTable& stats,
                                     const PrecisionSet& precisions,
                                     SymbolTable& table) {
  SymbolicInstance si;
  si.id = inst.id;
  si.label = inst.label;
  si.layers.resize(precisions.layer_count());
  for (std::size_t li = 0; li < precisions.layer_count(); ++li) {
    int p = precisions.levels[li];
    si.layers[li].reserve(inst.values.size());
    for (std::uint32_t c = 0; c < inst.values.size(); ++c) {
      Symbol s =
          discretize_value(inst.values[c], c, attribute_names[c], stats.at(c), p);
      si.layers[li].push_back(table.intern(std::move(s)));
    }
  }
  finish_sets(si);
  return si;
}

SymbolicInstance discretize_instance_frozen(const Instance& inst,
                                            std::span<const std::string> attribute_names,
                                            const AttributeStatsTable& stats,
                                            const PrecisionSet& precisions,
                                            const SymbolTable& table) {
  SymbolicInstance si;
  si.id = inst.id;
  si.label = inst.label;
  si.layers.resize(precisions.layer_count());
  for (std::size_t li = 0; li < precisions.layer_count(); ++li) {
    int p = precisions.levels[li];
    si.layers[li].reserve(inst.values.size());
    for (std::uint32_t c = 0; c < inst.values.size(); ++c) {
      Symbol s =
          discretize_value(inst.values[c], c, attribute_names[c], stats.at(c), p);
      SymbolId id;
      if (table.find(s, id)) si.layers[li].push_back(id);
      // unseen symbols cannot match any stored pattern; drop them
    }
  }
  finish_sets(si);
  return si;
}

void remap_instance(SymbolicInstance& si, const std::vector<SymbolId>& old_to_new) {
  for (auto& layer : si.layers) {
    for (auto& id : layer) id = old_to_new[id];
    std::sort(layer.begin(), layer.end());
  }
  for (auto& id : si.merged) id = old_to_new[id];
  std::sort(si.merged.begin(), si.merged.end());
}

FilterResult anti_contradiction_filter(std::vector<SymbolicInstance> train,
                                       Warnings* warnings) {
  std::unordered_map<SymbolSet, std::uint8_t, SymbolSetHash> seen;
  seen.reserve(train.size() * 2);
  for (const auto& si : train) {
    seen[si.merged] |= si.label == Label::Normal ? 1u : 2u;
  }
  FilterResult result;
  result.kept.reserve(train.size());
  for (auto& si : train) {
    if (seen.at(si.merged) == 3u) {
      result.removed_ids.push_back(si.id);
    } else {
      result.kept.push_back(std::move(si));
    }
  }
  if (!result.removed_ids.empty() && result.kept.empty()) {
    warn(warnings,
         "anti-contradiction filter removed every training instance (" +
             std::to_string(result.removed_ids.size()) + ")");
  }
  return result;
}

}  // namespace igmd
