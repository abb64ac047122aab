#include <doctest.h>

#include <random>

#include "mine.hpp"
#include "support/generators.hpp"
#include "support/reference_mine.hpp"

using namespace igmd;

namespace {

// Symbols here are plain ids; single layer at level 0 unless stated.
SymbolicInstance si(std::size_t id, Label label, std::vector<SymbolSet> layers) {
  SymbolicInstance s;
  s.id = id;
  s.label = label;
  s.layers = std::move(layers);
  for (const auto& layer : s.layers)
    s.merged.insert(s.merged.end(), layer.begin(), layer.end());
  std::sort(s.merged.begin(), s.merged.end());
  s.merged.erase(std::unique(s.merged.begin(), s.merged.end()), s.merged.end());
  return s;
}

constexpr SymbolId a = 0, b = 1, c = 2, d = 3, e = 4, f = 5, x = 6, z = 7;

}  // namespace

TEST_CASE("mine_candidates intersects every unordered pair") {
  SUBCASE("single pair") {
    std::vector<SymbolicInstance> instances = {si(0, Label::Normal, {{a, b, c}}),
                                               si(1, Label::Normal, {{a, b, d}})};
    auto cands = mine_candidates(instances, 0);
    CHECK(cands == std::vector<SymbolSet>{{a, b}});
  }
  SUBCASE("disjoint pair drops the empty intersection") {
    std::vector<SymbolicInstance> instances = {si(0, Label::Normal, {{a}}),
                                               si(1, Label::Normal, {{b}})};
    CHECK(mine_candidates(instances, 0).empty());
  }
  SUBCASE("three instances sharing one symbol dedupe to a single set") {
    std::vector<SymbolicInstance> instances = {si(0, Label::Normal, {{a, b}}),
                                               si(1, Label::Normal, {{a, c}}),
                                               si(2, Label::Normal, {{a, d}})};
    auto cands = mine_candidates(instances, 0);
    CHECK(cands == std::vector<SymbolSet>{{a}});
  }
  SUBCASE("fewer than two instances warns and yields nothing") {
    std::vector<SymbolicInstance> instances = {si(0, Label::Normal, {{a}})};
    Warnings w;
    CHECK(mine_candidates(instances, 0, &w).empty());
    CHECK(w.size() == 1);
  }
}

TEST_CASE("coherence_filter drops candidates contained in the opposite class") {
  std::vector<SymbolSet> cands = {{a, b}};
  SUBCASE("not contained: kept") {
    std::vector<SymbolicInstance> opposite = {si(0, Label::Anomalous, {{a, e}})};
    CHECK(coherence_filter(cands, opposite, 0) == std::vector<SymbolSet>{{a, b}});
  }
  SUBCASE("contained in a superset instance: removed") {
    std::vector<SymbolicInstance> opposite = {si(0, Label::Anomalous, {{a, b, z}})};
    CHECK(coherence_filter(cands, opposite, 0).empty());
  }
  SUBCASE("no opposite instances: vacuously kept") {
    std::vector<SymbolicInstance> opposite;
    CHECK(coherence_filter(cands, opposite, 0) == std::vector<SymbolSet>{{a, b}});
  }
}

TEST_CASE("count_frequency counts containing instances") {
  std::vector<SymbolicInstance> instances = {si(0, Label::Normal, {{a, b, c}}),
                                             si(1, Label::Normal, {{a, b, d}}),
                                             si(2, Label::Normal, {{a, e}})};
  CHECK(count_frequency({a, b}, instances, 0) == 2);
  CHECK(count_frequency({a}, instances, 0) == 3);

  std::vector<SymbolicInstance> twins = {si(0, Label::Normal, {{a, b}}),
                                         si(1, Label::Normal, {{a, b}})};
  CHECK(count_frequency({a, b}, twins, 0) == 2);  // a full instance contains itself
}

TEST_CASE("build_store mines both classes per layer") {
  std::vector<SymbolicInstance> train = {
      si(0, Label::Normal, {{a, b, c}}), si(1, Label::Normal, {{a, b, d}}),
      si(2, Label::Anomalous, {{a, e}}), si(3, Label::Anomalous, {{e, f}})};
  PrecisionSet ps = PrecisionSet::parse("0");
  PatternStore store = build_store(train, ps, 8);

  auto cnp = store.layer_class(0, Label::Normal);
  REQUIRE(cnp.size() == 1);
  CHECK(cnp[0].symbols == SymbolSet{a, b});
  CHECK(cnp[0].freq == 2);

  auto cap = store.layer_class(0, Label::Anomalous);
  REQUIRE(cap.size() == 1);
  CHECK(cap[0].symbols == SymbolSet{e});
  CHECK(cap[0].freq == 2);

  SUBCASE("inverted index lists each pattern under each of its symbols") {
    for (std::uint32_t qid = 0; qid < store.patterns().size(); ++qid) {
      for (SymbolId s : store.patterns()[qid].symbols) {
        const auto& postings = store.postings(s);
        CHECK(std::find(postings.begin(), postings.end(), qid) != postings.end());
      }
    }
  }
}

TEST_CASE("an empty class leaves that side of the store empty") {
  std::vector<SymbolicInstance> train = {si(0, Label::Normal, {{a, b}}),
                                         si(1, Label::Normal, {{a, b}})};
  PatternStore store = build_store(train, PrecisionSet::parse("0"), 8);
  CHECK(store.layer_class(0, Label::Normal).size() == 1);
  CHECK(store.layer_class(0, Label::Anomalous).empty());
}

TEST_CASE("layers are mined independently") {
  // two layers with unrelated contents; the slice at each layer must equal a
  // run of the per-layer stages alone
  std::vector<SymbolicInstance> train = {
      si(0, Label::Normal, {{a, b, c}, {x, z}}),
      si(1, Label::Normal, {{a, b, d}, {x, z}}),
      si(2, Label::Anomalous, {{a, e}, {e, f}}),
      si(3, Label::Anomalous, {{e, f}, {e, z}})};
  PrecisionSet ps = PrecisionSet::parse("0,1");
  PatternStore store = build_store(train, ps, 8);

  for (std::size_t li = 0; li < 2; ++li) {
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<SymbolicInstance> same, opposite;
      for (const auto& inst : train) {
        (static_cast<int>(inst.label) == cls ? same : opposite).push_back(inst);
      }
      auto expected = coherence_filter(mine_candidates(same, li), opposite, li);
      auto got = store.layer_class(li, static_cast<Label>(cls));
      REQUIRE(got.size() == expected.size());
      for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(got[k].symbols == expected[k]);
        CHECK(got[k].freq == count_frequency(expected[k], same, li));
        CHECK(got[k].layer == ps.levels[li]);
      }
    }
  }
}

namespace {

bool patterns_equal(const std::vector<Pattern>& lhs, const std::vector<Pattern>& rhs) {
  if (lhs.size() != rhs.size()) return false;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i].symbols != rhs[i].symbols || lhs[i].cls != rhs[i].cls ||
        lhs[i].layer != rhs[i].layer || lhs[i].freq != rhs[i].freq) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("build_store matches the naive oracle on random datasets") {
  PrecisionSet ps = PrecisionSet::parse("0,1");
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    std::mt19937_64 gen(seed);
    auto instances =
        igmd::testing::random_instances(gen, 4 + gen() % 9, 2 + gen() % 5);
    auto d = igmd::testing::discretize_train(instances, ps);
    PatternStore store = build_store(d.kept, ps, d.table.size());
    auto expected = igmd::testing::reference_mine(d.kept, ps);
    CAPTURE(seed);
    CHECK(patterns_equal(store.patterns(), expected));
  }
}

TEST_CASE("store invariants hold on random datasets") {
  PrecisionSet ps = PrecisionSet::parse("0,1");
  std::mt19937_64 gen(99);
  for (int round = 0; round < 10; ++round) {
    auto instances = igmd::testing::random_instances(gen, 12, 4);
    auto d = igmd::testing::discretize_train(instances, ps);
    PatternStore store = build_store(d.kept, ps, d.table.size());

    for (std::size_t li = 0; li < ps.layer_count(); ++li) {
      for (int cls = 0; cls < 2; ++cls) {
        auto span = store.layer_class(li, static_cast<Label>(cls));
        for (std::size_t k = 0; k < span.size(); ++k) {
          CHECK(span[k].freq >= 2);
          CHECK(span[k].length() >= 1);
          if (k > 0) CHECK(span[k - 1].symbols < span[k].symbols);  // dedup+order
          // mutual exclusion: never contained in an opposite-class instance
          for (const auto& inst : d.kept) {
            if (inst.label == static_cast<Label>(cls)) continue;
            CHECK_FALSE(is_subset(span[k].symbols, inst.layers[li]));
          }
        }
      }
    }
  }
}

TEST_CASE("worker count does not change the mined store") {
  PrecisionSet ps = PrecisionSet::parse("0,1");
  std::mt19937_64 gen(123);
  auto instances = igmd::testing::random_instances(gen, 60, 5);
  auto d = igmd::testing::discretize_train(instances, ps);
  PatternStore one = build_store(d.kept, ps, d.table.size(), nullptr, 1);
  PatternStore four = build_store(d.kept, ps, d.table.size(), nullptr, 4);
  CHECK(patterns_equal(one.patterns(), four.patterns()));
}

TEST_CASE("a trained model's pattern list equals the oracle on a toy set") {
  auto make = [](std::size_t id, Label label, double v, const char* proto) {
    Instance inst;
    inst.id = id;
    inst.label = label;
    inst.values = {AttributeValue::numeric(v), AttributeValue::categorical(proto)};
    return inst;
  };
  std::vector<Instance> toy = {
      make(0, Label::Normal, 1.0, "tcp"),    make(1, Label::Normal, 1.0, "tcp"),
      make(2, Label::Normal, 2.0, "tcp"),    make(3, Label::Anomalous, 8.0, "udp"),
      make(4, Label::Anomalous, 8.0, "udp"), make(5, Label::Anomalous, 9.0, "tcp")};
  PrecisionSet ps = PrecisionSet::parse("0,1");
  Model model = train_model(toy, igmd::testing::schema_for(2), {ps, 3.0});
  auto d = igmd::testing::discretize_train(toy, ps);
  auto expected = igmd::testing::reference_mine(d.kept, ps);
  CHECK(patterns_equal(model.store.patterns(), expected));
  CHECK(model.store.patterns().size() > 0);
}

TEST_CASE("reference_mine refuses inputs beyond the oracle bound") {
  std::vector<SymbolicInstance> big;
  for (std::size_t i = 0; i < 16; ++i) big.push_back(si(i, Label::Normal, {{a}}));
  CHECK_THROWS_AS(igmd::testing::reference_mine(big, PrecisionSet::parse("0")),
                  Error);
}
