#include "mine.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "parallel.hpp"

namespace igmd {

namespace {

SymbolSet intersect(const SymbolSet& a, const SymbolSet& b) {
  SymbolSet out;
  out.reserve(std::min(a.size(), b.size()));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

using CandidateSet = std::unordered_set<SymbolSet, SymbolSetHash>;

// Posting lists (instance ordinals per symbol) for one class at one layer.
class LayerIndex {
 public:
  LayerIndex(std::span<const SymbolicInstance> instances, std::size_t layer_index)
      : instances_(instances), layer_index_(layer_index) {
    for (std::uint32_t i = 0; i < instances.size(); ++i) {
      for (SymbolId s : instances[i].layers[layer_index]) {
        postings_[s].push_back(i);
      }
    }
  }

  // Walks the rarest posting list among q's symbols; any symbol with no
  // postings settles containment immediately.
  bool contained_anywhere(const SymbolSet& q) const {
    const std::vector<std::uint32_t>* rarest = rarest_postings(q);
    if (!rarest) return false;
    for (std::uint32_t i : *rarest) {
      if (is_subset(q, instances_[i].layers[layer_index_])) return true;
    }
    return false;
  }

  std::uint32_t count_containing(const SymbolSet& q) const {
    const std::vector<std::uint32_t>* rarest = rarest_postings(q);
    if (!rarest) return 0;
    std::uint32_t n = 0;
    for (std::uint32_t i : *rarest) {
      if (is_subset(q, instances_[i].layers[layer_index_])) ++n;
    }
    return n;
  }

 private:
  const std::vector<std::uint32_t>* rarest_postings(const SymbolSet& q) const {
    const std::vector<std::uint32_t>* best = nullptr;
    for (SymbolId s : q) {
      auto it = postings_.find(s);
      if (it == postings_.end()) return nullptr;
      if (!best || it->second.size() < best->size()) best = &it->second;
    }
    return best;
  }

  std::span<const SymbolicInstance> instances_;
  std::size_t layer_index_;
  std::unordered_map<SymbolId, std::vector<std::uint32_t>> postings_;
};

}  // namespace

std::vector<SymbolSet> mine_candidates(std::span<const SymbolicInstance> class_instances,
                                       std::size_t layer_index, Warnings* warnings,
                                       unsigned threads) {
  const std::size_t n = class_instances.size();
  if (n < 2) {
    warn(warnings, "pattern mining needs at least 2 instances in a class, got " +
                       std::to_string(n));
    return {};
  }
  std::size_t pair_count = n * (n - 1) / 2;
  unsigned workers = effective_threads(threads, pair_count);

  std::vector<CandidateSet> local(workers);
  // Row i costs n-i-1 intersections; striding i over workers balances the load.
  run_workers(workers, [&](unsigned t) {
    CandidateSet& mine = local[t];
    for (std::size_t i = t; i < n; i += workers) {
      const SymbolSet& a = class_instances[i].layers[layer_index];
      for (std::size_t j = i + 1; j < n; ++j) {
        SymbolSet q = intersect(a, class_instances[j].layers[layer_index]);
        if (!q.empty()) mine.insert(std::move(q));
      }
    }
  });

  CandidateSet merged = std::move(local[0]);
  for (unsigned t = 1; t < workers; ++t) {
    for (auto& q : local[t]) merged.insert(q);
  }
  std::vector<SymbolSet> out(merged.begin(), merged.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SymbolSet> coherence_filter(std::vector<SymbolSet> candidates,
                                        std::span<const SymbolicInstance> opposite_instances,
                                        std::size_t layer_index) {
  if (opposite_instances.empty()) return candidates;
  LayerIndex index(opposite_instances, layer_index);
  std::vector<SymbolSet> kept;
  kept.reserve(candidates.size());
  for (auto& q : candidates) {
    if (!index.contained_anywhere(q)) kept.push_back(std::move(q));
  }
  return kept;
}

std::uint32_t count_frequency(const SymbolSet& pattern,
                              std::span<const SymbolicInstance> class_instances,
                              std::size_t layer_index) {
  LayerIndex index(class_instances, layer_index);
  return index.count_containing(pattern);
}

const std::vector<std::uint32_t> PatternStore::kEmptyPostings;

PatternStore::PatternStore(std::vector<Pattern> patterns,
                           const PrecisionSet& precisions, std::size_t symbol_count)
    : patterns_(std::move(patterns)) {
  ranges_.assign(precisions.layer_count() * 2, {0, 0});
  index_.resize(symbol_count);
  std::uint32_t pos = 0;
  for (std::size_t li = 0; li < precisions.layer_count(); ++li) {
    for (int cls = 0; cls < 2; ++cls) {
      std::uint32_t begin = pos;
      while (pos < patterns_.size() &&
             patterns_[pos].layer == precisions.levels[li] &&
             patterns_[pos].cls == static_cast<Label>(cls)) {
        ++pos;
      }
      ranges_[2 * li + cls] = {begin, pos};
    }
  }
  lengths_.reserve(patterns_.size());
  weights_.reserve(patterns_.size());
  flat_offsets_.reserve(patterns_.size() + 1);
  flat_offsets_.push_back(0);
  for (std::uint32_t qid = 0; qid < patterns_.size(); ++qid) {
    for (SymbolId s : patterns_[qid].symbols) index_[s].push_back(qid);
    lengths_.push_back(patterns_[qid].length());
    weights_.push_back(patterns_[qid].weight());
    flat_symbols_.insert(flat_symbols_.end(), patterns_[qid].symbols.begin(),
                         patterns_[qid].symbols.end());
    flat_offsets_.push_back(static_cast<std::uint32_t>(flat_symbols_.size()));
  }
}

std::span<const Pattern> PatternStore::layer_class(std::size_t layer_index,
                                                   Label cls) const {
  auto [b, e] = ranges_[2 * layer_index + static_cast<std::size_t>(cls)];
  return {patterns_.data() + b, patterns_.data() + e};
}

const std::vector<std::uint32_t>& PatternStore::postings(SymbolId s) const {
  if (s >= index_.size()) return kEmptyPostings;
  return index_[s];
}

PatternStore build_store(std::span<const SymbolicInstance> train,
                         const PrecisionSet& precisions, std::size_t symbol_count,
                         Warnings* warnings, unsigned threads) {
  std::vector<SymbolicInstance> classes[2];
  for (const auto& si : train) {
    classes[static_cast<std::size_t>(si.label)].push_back(si);
  }

  std::vector<Pattern> patterns;
  for (std::size_t li = 0; li < precisions.layer_count(); ++li) {
    for (int cls = 0; cls < 2; ++cls) {
      const auto& same = classes[cls];
      const auto& opposite = classes[1 - cls];
      std::vector<SymbolSet> candidates =
          mine_candidates(same, li, li == 0 ? warnings : nullptr, threads);
      if (candidates.empty()) continue;

      LayerIndex opposite_index(opposite, li);
      LayerIndex same_index(same, li);
      std::vector<std::uint32_t> freq(candidates.size(), 0);
      unsigned workers = effective_threads(threads, candidates.size() * 64);
      run_workers(workers, [&](unsigned t) {
        for (std::size_t k = t; k < candidates.size(); k += workers) {
          if (!opposite.empty() && opposite_index.contained_anywhere(candidates[k]))
            continue;  // freq stays 0: incoherent
          freq[k] = same_index.count_containing(candidates[k]);
        }
      });

      for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (freq[k] == 0) continue;
        Pattern q;
        q.symbols = std::move(candidates[k]);
        q.cls = static_cast<Label>(cls);
        q.layer = precisions.levels[li];
        q.freq = freq[k];
        patterns.push_back(std::move(q));
      }
    }
  }
  return PatternStore(std::move(patterns), precisions, symbol_count);
}

}  // namespace igmd
