#include <doctest.h>

#include <random>

#include "score.hpp"
#include "support/generators.hpp"
#include "support/reference_mine.hpp"

using namespace igmd;

namespace {

constexpr SymbolId a = 0, b = 1, c = 2, d = 3, x = 4;

// A bare single-layer model around hand-built patterns; symbol ids are used
// directly, the table only matters for explain().
Model toy_model(std::vector<Pattern> patterns, std::size_t n_symbols = 8) {
  Model m;
  m.precisions = PrecisionSet::parse("0");
  m.attribute_names = igmd::testing::attr_names(n_symbols);
  for (std::uint32_t i = 0; i < n_symbols; ++i) {
    m.symbols.intern({i, "a" + std::to_string(i), kCategoricalTag,
                      std::string(1, char('a' + i))});
  }
  m.symbols.finalize();
  m.store = PatternStore(std::move(patterns), m.precisions, n_symbols);
  return m;
}

Pattern pat(SymbolSet symbols, Label cls, std::uint32_t freq, int layer = 0) {
  Pattern q;
  q.symbols = std::move(symbols);
  q.cls = cls;
  q.layer = layer;
  q.freq = freq;
  return q;
}

SymbolicInstance inst(std::vector<SymbolSet> layers) {
  SymbolicInstance si;
  si.layers = std::move(layers);
  for (const auto& l : si.layers)
    si.merged.insert(si.merged.end(), l.begin(), l.end());
  std::sort(si.merged.begin(), si.merged.end());
  si.merged.erase(std::unique(si.merged.begin(), si.merged.end()),
                  si.merged.end());
  return si;
}

}  // namespace

TEST_CASE("score accumulates freq * length^2 over contained patterns") {
  SUBCASE("single pattern") {
    Model m = toy_model({pat({a, b}, Label::Normal, 2)});
    ScorePair sp = score(inst({{a, b, x}}), m);
    CHECK(sp.ns == 8);  // 2 * 2^2
    CHECK(sp.as == 0);
    REQUIRE(sp.matched_normal.size() == 1);
    CHECK(sp.matched_normal[0].contribution == 8);
  }
  SUBCASE("no shared symbols scores zero") {
    Model m = toy_model({pat({a, b}, Label::Normal, 2)});
    ScorePair sp = score(inst({{c, d}}), m);
    CHECK(sp.ns == 0);
    CHECK(sp.as == 0);
    CHECK(sp.matched_normal.empty());
  }
  SUBCASE("nested patterns both fire") {
    Model m = toy_model(
        {pat({a}, Label::Normal, 2), pat({a, b}, Label::Normal, 3)});
    ScorePair sp = score(inst({{a, b}}), m);
    CHECK(sp.ns == 2 * 1 + 3 * 4);  // 14
  }
  SUBCASE("precision mismatch is refused") {
    Model m = toy_model({pat({a}, Label::Normal, 2)});
    CHECK_THROWS_AS(score(inst({{a}, {a}}), m), Error);
  }
}

TEST_CASE("score additivity: listed contributions sum to the scores") {
  std::mt19937_64 gen(31);
  PrecisionSet ps = PrecisionSet::parse("0,1");
  for (int round = 0; round < 10; ++round) {
    auto data = igmd::testing::random_instances(gen, 10, 4);
    Model m = train_model(data, igmd::testing::schema_for(4), {ps, 3.0});
    auto probe = igmd::testing::random_instances(gen, 5, 4);
    for (const auto& p : probe) {
      SymbolicInstance si = discretize_instance_frozen(
          p, m.attribute_names, m.stats, m.precisions, m.symbols);
      ScorePair sp = score(si, m);
      std::uint64_t ns = 0, as = 0;
      for (const auto& mt : sp.matched_normal) ns += mt.contribution;
      for (const auto& mt : sp.matched_anomalous) as += mt.contribution;
      CHECK(sp.ns == ns);
      CHECK(sp.as == as);
    }
  }
}

TEST_CASE("adding an anomalous pattern never decreases AS") {
  Model base = toy_model({pat({a, b}, Label::Normal, 2)});
  Model extended = toy_model(
      {pat({a, b}, Label::Normal, 2), pat({c}, Label::Anomalous, 4)});
  for (const auto& layers :
       {SymbolSet{a, b}, SymbolSet{c}, SymbolSet{a, c}, SymbolSet{d}}) {
    std::uint64_t before = score(inst({layers}), base).as;
    std::uint64_t after = score(inst({layers}), extended).as;
    CHECK(after >= before);
  }
}

TEST_CASE("guard band calibration uses population statistics") {
  SUBCASE("constant NS values") {
    Model m = toy_model({pat({a, b}, Label::Normal, 2)});
    std::vector<SymbolicInstance> normals = {inst({{a, b}}), inst({{a, b}})};
    GuardBand gb = calibrate_guard_band(normals, m, 2.0);
    CHECK(gb.enabled);
    CHECK(gb.mu_n == 8.0);
    CHECK(gb.sigma_n == 0.0);
    CHECK(gb.threshold() == 8.0);
  }
  SUBCASE("two-point spread") {
    // NS values 6 and 10 via singleton patterns of freq 6 and 10
    Model m = toy_model(
        {pat({a}, Label::Normal, 6), pat({b}, Label::Normal, 10)});
    std::vector<SymbolicInstance> normals = {inst({{a}}), inst({{b}})};
    GuardBand gb = calibrate_guard_band(normals, m, 1.0);
    CHECK(gb.mu_n == 8.0);
    CHECK(gb.sigma_n == 2.0);
    CHECK(gb.threshold() == 6.0);
  }
  SUBCASE("all-zero NS") {
    Model m = toy_model({pat({a}, Label::Anomalous, 3)});
    std::vector<SymbolicInstance> normals = {inst({{b}}), inst({{c}})};
    GuardBand gb = calibrate_guard_band(normals, m, 5.0);
    CHECK(gb.threshold() == 0.0);
  }
  SUBCASE("no normal instances disables the rule with a warning") {
    Model m = toy_model({pat({a}, Label::Normal, 2)});
    Warnings w;
    GuardBand gb = calibrate_guard_band({}, m, 3.0, &w);
    CHECK_FALSE(gb.enabled);
    CHECK(w.size() == 1);
    ScorePair sp;
    sp.ns = 1;  // tiny but nonzero: the disabled rule must never fire
    Verdict v = classify(sp, gb);
    CHECK(v.label == Label::Normal);
  }
}

namespace {

ScorePair scores(std::uint64_t ns, std::uint64_t as) {
  ScorePair sp;
  sp.ns = ns;
  sp.as = as;
  return sp;
}

GuardBand band(double mu, double sigma, double r) {
  GuardBand gb;
  gb.enabled = true;
  gb.mu_n = mu;
  gb.sigma_n = sigma;
  gb.r = r;
  return gb;
}

}  // namespace

TEST_CASE("classify covers all four rule attributions") {
  GuardBand gb = band(100.0, 10.0, 3.0);  // threshold 70

  SUBCASE("score dominance on strict majority") {
    Verdict v = classify(scores(2, 5), gb);
    CHECK(v.label == Label::Anomalous);
    CHECK(v.rule == Rule::ScoreDominance);
  }
  SUBCASE("boundary equality AS = NS is anomalous") {
    Verdict v = classify(scores(5, 5), gb);
    CHECK(v.label == Label::Anomalous);
    CHECK(v.rule == Rule::ScoreDominance);
  }
  SUBCASE("double zero attributed when nothing matched") {
    Verdict v = classify(scores(0, 0), gb);
    CHECK(v.label == Label::Anomalous);
    CHECK(v.rule == Rule::DoubleZero);
  }
  SUBCASE("statistical deviation strictly below the threshold") {
    Verdict v = classify(scores(10, 2), gb);
    CHECK(v.label == Label::Anomalous);
    CHECK(v.rule == Rule::StatisticalDeviation);
  }
  SUBCASE("NS exactly at the threshold stays normal") {
    Verdict v = classify(scores(70, 2), gb);
    CHECK(v.label == Label::Normal);
    CHECK(v.rule == Rule::NormalDefault);
  }
  SUBCASE("normal default") {
    Verdict v = classify(scores(200, 2), gb);
    CHECK(v.label == Label::Normal);
    CHECK(v.rule == Rule::NormalDefault);
  }
}

TEST_CASE("classify is total: exactly one rule for any score pair") {
  std::mt19937_64 gen(17);
  GuardBand gb = band(50.0, 5.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    Verdict v = classify(scores(gen() % 100, gen() % 100), gb);
    if (v.rule == Rule::NormalDefault) CHECK(v.label == Label::Normal);
    else CHECK(v.label == Label::Anomalous);
  }
}

TEST_CASE("raising r never flips a normal verdict to anomalous") {
  std::mt19937_64 gen(23);
  for (int i = 0; i < 2000; ++i) {
    double mu = double(gen() % 100);
    double sigma = double(gen() % 10);
    double r1 = double(gen() % 5);
    double r2 = r1 + 1.0 + double(gen() % 3);
    CHECK(band(mu, sigma, r2).threshold() <= band(mu, sigma, r1).threshold());
    ScorePair sp = scores(gen() % 120, gen() % 120);
    Verdict low_r = classify(sp, band(mu, sigma, r1));
    Verdict high_r = classify(sp, band(mu, sigma, r2));
    if (low_r.label == Label::Normal) CHECK(high_r.label == Label::Normal);
  }
}

TEST_CASE("instances with no known symbols are flagged via double zero") {
  Model m = toy_model({pat({a, b}, Label::Normal, 2), pat({c}, Label::Anomalous, 2)});
  Verdict v = classify(score(inst({{d, x}}), m), band(8.0, 0.0, 3.0));
  CHECK(v.label == Label::Anomalous);
  CHECK(v.rule == Rule::DoubleZero);
}

TEST_CASE("interleaved scoring against models of different sizes stays exact") {
  // one thread scores several stores in sequence; per-thread scratch state
  // from an earlier (differently sized) model must never leak into the next
  std::mt19937_64 gen(207);
  PrecisionSet ps = PrecisionSet::parse("0,1");
  std::vector<Model> models;
  for (std::size_t attrs : {3, 6, 2, 5}) {
    auto data = igmd::testing::random_instances(gen, 12, attrs);
    models.push_back(
        train_model(data, igmd::testing::schema_for(attrs), {ps, 3.0}));
  }
  for (int round = 0; round < 40; ++round) {
    const Model& m = models[round % models.size()];
    auto probe =
        igmd::testing::random_instances(gen, 1, m.attribute_names.size());
    SymbolicInstance si = discretize_instance_frozen(
        probe[0], m.attribute_names, m.stats, m.precisions, m.symbols);
    ScorePair fast = score(si, m, false);
    ScorePair slow = igmd::testing::naive_score(si, m);
    CHECK(fast.ns == slow.ns);
    CHECK(fast.as == slow.as);
  }
}

TEST_CASE("dense stores score identically to the subset scan") {
  // one shared attribute value per class makes most patterns overlap most
  // instances, forcing the sequential-scan path
  std::mt19937_64 gen(301);
  std::vector<Instance> data;
  for (std::size_t i = 0; i < 120; ++i) {
    Instance inst;
    inst.id = i;
    inst.label = i % 2 ? Label::Anomalous : Label::Normal;
    for (int c = 0; c < 6; ++c) {
      double base = inst.label == Label::Normal ? 0.0 : 1.0;
      inst.values.push_back(AttributeValue::numeric(base + double(gen() % 3) * 0.5));
    }
    data.push_back(std::move(inst));
  }
  Model m = train_model(data, igmd::testing::schema_for(6),
                        {PrecisionSet::parse("0,1"), 3.0});
  REQUIRE(m.store.patterns().size() > 100);
  for (std::size_t i = 0; i < 30; ++i) {
    SymbolicInstance si = discretize_instance_frozen(
        data[i], m.attribute_names, m.stats, m.precisions, m.symbols);
    ScorePair fast = score(si, m, false);
    ScorePair slow = igmd::testing::naive_score(si, m);
    CHECK(fast.ns == slow.ns);
    CHECK(fast.as == slow.as);
  }
}

TEST_CASE("batch classification is identical for any worker count") {
  std::mt19937_64 gen(77);
  auto data = igmd::testing::random_instances(gen, 40, 5);
  Model m = train_model(data, igmd::testing::schema_for(5),
                        {PrecisionSet::parse("0,1"), 3.0});
  auto probes = igmd::testing::random_instances(gen, 60, 5);
  auto one = classify_all(probes, m, 1);
  auto four = classify_all(probes, m, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].label == four[i].label);
    CHECK(one[i].rule == four[i].rule);
    CHECK(one[i].scores.ns == four[i].scores.ns);
    CHECK(one[i].scores.as == four[i].scores.as);
  }
}

TEST_CASE("ranking score is AS minus NS") {
  CHECK(ranking_score(scores(8, 8)) == 0);
  CHECK(ranking_score(scores(0, 0)) == 0);
  CHECK(ranking_score(scores(14, 4)) == -10);
  CHECK(ranking_score(scores(4, 14)) == 10);
}

TEST_CASE("explain renders the decision trail") {
  Model m = toy_model({pat({a, b}, Label::Normal, 2), pat({c}, Label::Anomalous, 3)});
  m.guard_band = band(8.0, 0.0, 3.0);

  SUBCASE("double zero names the empty match") {
    Verdict v = classify(score(inst({{d, x}}), m), m.guard_band);
    std::string report = explain(v, m, 7);
    CHECK(report.find("instance 7") != std::string::npos);
    CHECK(report.find("DoubleZero") != std::string::npos);
    CHECK(report.find("no coherent pattern matched") != std::string::npos);
    CHECK(report.find("matched normal patterns (0)") != std::string::npos);
  }
  SUBCASE("single matched pattern row equals NS") {
    Verdict v = classify(score(inst({{a, b}}), m), m.guard_band);
    std::string report = explain(v, m, 0);
    CHECK(report.find("NS = 8") != std::string::npos);
    CHECK(report.find("contribution=8") != std::string::npos);
    CHECK(report.find("[layer p=0]") != std::string::npos);
    CHECK(report.find("a0=a") != std::string::npos);  // attribute name + code
  }
  SUBCASE("contributions are reported per pattern layer") {
    Model two = toy_model({pat({a}, Label::Normal, 2, 0)});
    two.precisions = PrecisionSet::parse("0,1");
    std::vector<Pattern> qs = {pat({a}, Label::Normal, 2, 0),
                               pat({b}, Label::Normal, 3, 1)};
    two.store = PatternStore(std::move(qs), two.precisions, 8);
    Verdict v = classify(score(inst({{a}, {b}}), two), band(0.0, 0.0, 3.0));
    std::string report = explain(v, two, 1);
    CHECK(report.find("[layer p=0]") != std::string::npos);
    CHECK(report.find("[layer p=1]") != std::string::npos);
  }
}
