#include "score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "parallel.hpp"

namespace igmd {

namespace {

// Per-thread epoch-stamped scratch, so consecutive score() calls skip the
// O(pattern-count) reset. Keeps score() safe to call from any number of
// threads against a shared immutable model.
struct ScoreScratch {
  std::vector<std::uint32_t> count;       // per pattern id
  std::vector<std::uint32_t> stamp;       // per pattern id
  std::vector<std::uint32_t> member;      // per symbol id
  std::vector<std::uint32_t> touched;
  std::uint32_t epoch = 0;

  // Recycled epochs must never collide with stale stamps, so any growth
  // clears every stamped array together.
  void prepare(std::size_t n_patterns, std::size_t n_symbols) {
    if (count.size() < n_patterns || member.size() < n_symbols ||
        epoch >= std::numeric_limits<std::uint32_t>::max() - 2) {
      count.assign(std::max(n_patterns, count.size()), 0);
      stamp.assign(std::max(n_patterns, stamp.size()), 0);
      member.assign(std::max(n_symbols, member.size()), 0);
      epoch = 0;
    }
  }
};

thread_local ScoreScratch tl_scratch;

}  // namespace

ScorePair score(const SymbolicInstance& t, const Model& model,
                bool collect_matches) {
  if (t.layers.size() != model.precisions.layer_count()) {
    throw_error(ErrorKind::Schema,
                "instance discretized with " + std::to_string(t.layers.size()) +
                    " precision layers, model expects " +
                    std::to_string(model.precisions.layer_count()));
  }
  ScorePair sp;
  const PatternStore& store = model.store;
  ScoreScratch& scratch = tl_scratch;
  scratch.prepare(store.patterns().size(), store.symbol_count());

  for (std::size_t li = 0; li < t.layers.size(); ++li) {
    // Pattern ids of one layer are contiguous, so the per-layer slice of a
    // posting list is a subrange; cat/nan symbols index patterns of every
    // layer and get trimmed here.
    const auto [lo, hi] = store.layer_range(li);
    if (lo == hi) continue;
    ++scratch.epoch;
    scratch.touched.clear();

    std::size_t gather_estimate = 0;
    for (SymbolId s : t.layers[li]) {
      const auto& posting = store.postings(s);
      auto begin = std::lower_bound(posting.begin(), posting.end(), lo);
      auto end = std::lower_bound(begin, posting.end(), hi);
      gather_estimate += static_cast<std::size_t>(end - begin);
    }

    if (gather_estimate * 4 > std::size_t(hi - lo)) {
      // Dense store relative to this instance: a sequential scan over the
      // layer's patterns with early exit beats walking the long posting
      // lists. Both paths fire exactly the same patterns.
      for (SymbolId s : t.layers[li]) scratch.member[s] = scratch.epoch;
      for (std::uint32_t qid = lo; qid < hi; ++qid) {
        bool contained = true;
        for (SymbolId s : store.flat_symbols(qid)) {
          if (scratch.member[s] != scratch.epoch) {
            contained = false;
            break;
          }
        }
        if (contained) scratch.touched.push_back(qid);
      }
    } else {
      // Output-sensitive counting: a pattern fires iff its id is gathered
      // once per symbol, i.e. all of its symbols occurred in the layer set.
      for (SymbolId s : t.layers[li]) {
        const auto& posting = store.postings(s);
        auto begin = std::lower_bound(posting.begin(), posting.end(), lo);
        auto end = std::lower_bound(begin, posting.end(), hi);
        for (auto it = begin; it != end; ++it) {
          std::uint32_t qid = *it;
          if (scratch.stamp[qid] != scratch.epoch) {
            scratch.stamp[qid] = scratch.epoch;
            scratch.count[qid] = 1;
            scratch.touched.push_back(qid);
          } else {
            ++scratch.count[qid];
          }
        }
      }
      std::sort(scratch.touched.begin(), scratch.touched.end());
      std::size_t kept = 0;
      for (std::uint32_t qid : scratch.touched) {
        if (scratch.count[qid] == store.length_of(qid))
          scratch.touched[kept++] = qid;
      }
      scratch.touched.resize(kept);
    }

    const std::uint32_t normal_end = store.normal_end(li);
    for (std::uint32_t qid : scratch.touched) {
      std::uint64_t w = store.weight_of(qid);
      if (qid < normal_end) {
        sp.ns += w;
        if (collect_matches) sp.matched_normal.push_back({qid, w});
      } else {
        sp.as += w;
        if (collect_matches) sp.matched_anomalous.push_back({qid, w});
      }
    }
  }
  return sp;
}

GuardBand calibrate_guard_band(std::span<const SymbolicInstance> normal_train,
                               const Model& model, double r, Warnings* warnings,
                               unsigned threads) {
  GuardBand gb;
  gb.r = r;
  if (normal_train.empty()) {
    warn(warnings,
         "no normal training instances: statistical-deviation rule disabled");
    return gb;
  }
  std::vector<double> ns_values(normal_train.size());
  unsigned workers = effective_threads(
      threads, normal_train.size() * model.store.patterns().size());
  run_workers(workers, [&](unsigned t) {
    for (std::size_t i = t; i < normal_train.size(); i += workers) {
      ns_values[i] =
          double(score(normal_train[i], model, /*collect_matches=*/false).ns);
    }
  });
  double sum = 0.0;
  for (double v : ns_values) sum += v;
  double mean = sum / double(ns_values.size());
  double sq = 0.0;
  for (double v : ns_values) sq += (v - mean) * (v - mean);
  gb.enabled = true;
  gb.mu_n = mean;
  gb.sigma_n = std::sqrt(sq / double(ns_values.size()));
  return gb;
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::ScoreDominance: return "ScoreDominance";
    case Rule::DoubleZero: return "DoubleZero";
    case Rule::StatisticalDeviation: return "StatisticalDeviation";
    case Rule::NormalDefault: return "NormalDefault";
  }
  return "?";
}

Verdict classify(ScorePair sp, const GuardBand& gb) {
  Verdict v;
  v.scores = std::move(sp);
  const std::uint64_t ns = v.scores.ns;
  const std::uint64_t as = v.scores.as;
  if (ns == 0 && as == 0) {
    // subsumed by AS >= NS, attributed separately: "nothing matched at all"
    v.label = Label::Anomalous;
    v.rule = Rule::DoubleZero;
  } else if (as >= ns) {
    v.label = Label::Anomalous;
    v.rule = Rule::ScoreDominance;
  } else if (double(ns) < gb.threshold()) {  // strictly below
    v.label = Label::Anomalous;
    v.rule = Rule::StatisticalDeviation;
  } else {
    v.label = Label::Normal;
    v.rule = Rule::NormalDefault;
  }
  return v;
}

std::int64_t ranking_score(const ScorePair& sp) {
  return static_cast<std::int64_t>(sp.as) - static_cast<std::int64_t>(sp.ns);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string render_symbol(const Symbol& s) {
  if (s.tag == kCategoricalTag) return s.attribute + "=" + s.code;
  if (s.tag == kMissingTag) return s.attribute + "=NaN";
  return s.attribute + ".z" + std::to_string(s.tag) + "=" + s.code;
}

void append_matches(std::string& out, const char* heading,
                    const std::vector<MatchedPattern>& matches,
                    const Model& model) {
  out += heading;
  out += " (" + std::to_string(matches.size()) + ")\n";
  std::vector<MatchedPattern> ordered = matches;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const MatchedPattern& a, const MatchedPattern& b) {
                     if (a.contribution != b.contribution)
                       return a.contribution > b.contribution;
                     return a.pattern_id < b.pattern_id;
                   });
  for (const auto& m : ordered) {
    const Pattern& q = model.store.patterns()[m.pattern_id];
    out += "  [layer p=" + std::to_string(q.layer) + "] freq=" +
           std::to_string(q.freq) + " len=" + std::to_string(q.length()) +
           " contribution=" + std::to_string(m.contribution) + ": ";
    for (std::size_t i = 0; i < q.symbols.size(); ++i) {
      if (i) out += ", ";
      out += render_symbol(model.symbols.at(q.symbols[i]));
    }
    out += "\n";
  }
}

}  // namespace

std::string explain(const Verdict& verdict, const Model& model,
                    std::size_t instance_id) {
  std::string out;
  out += "instance " + std::to_string(instance_id) + ": " +
         label_name(verdict.label) + " (rule: " + rule_name(verdict.rule) + ")\n";
  out += "NS = " + std::to_string(verdict.scores.ns) + "\n";
  out += "AS = " + std::to_string(verdict.scores.as) + "\n";
  out += "ranking score (AS - NS) = " + std::to_string(ranking_score(verdict.scores)) +
         "\n";
  const GuardBand& gb = model.guard_band;
  if (gb.enabled) {
    out += "guard band: threshold = " + format_double(gb.threshold()) +
           " (mu_N = " + format_double(gb.mu_n) +
           ", sigma_N = " + format_double(gb.sigma_n) +
           ", r = " + format_double(gb.r) + ")\n";
  } else {
    out += "guard band: disabled (no normal training scores)\n";
  }
  if (verdict.rule == Rule::DoubleZero) {
    out += "no coherent pattern matched either class\n";
  }
  append_matches(out, "matched anomalous patterns", verdict.scores.matched_anomalous,
                 model);
  append_matches(out, "matched normal patterns", verdict.scores.matched_normal,
                 model);
  return out;
}

}  // namespace igmd
