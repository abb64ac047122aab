#include "evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace igmd {

Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw_error(ErrorKind::Usage,
                "confusion: " + std::to_string(truth.size()) + " truth labels vs " +
                    std::to_string(predicted.size()) + " predictions");
  }
  if (truth.empty())
    throw_error(ErrorKind::Usage, "confusion: need at least one instance");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    bool actual = truth[i] == Label::Anomalous;
    bool flagged = predicted[i] == Label::Anomalous;
    if (actual && flagged) ++c.tp;
    else if (!actual && flagged) ++c.fp;
    else if (actual && !flagged) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics metrics(const Confusion& c) {
  Metrics m;
  std::uint64_t n = c.total();
  if (n == 0) throw_error(ErrorKind::Usage, "metrics: empty confusion matrix");
  m.accuracy = double(c.tp + c.tn) / double(n);
  if (c.tp + c.fp > 0) m.precision = double(c.tp) / double(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = double(c.tp) / double(c.tp + c.fn);
  return m;
}

std::optional<double> auc(std::span<const double> scores,
                          std::span<const Label> truth) {
  if (scores.size() != truth.size())
    throw_error(ErrorKind::Usage, "auc: scores and labels differ in length");
  std::size_t n = scores.size();
  std::size_t n_anomalous = 0;
  for (Label l : truth)
    if (l == Label::Anomalous) ++n_anomalous;
  std::size_t n_normal = n - n_anomalous;
  if (n_anomalous == 0 || n_normal == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Rank sum of the anomalous class with midranks over tie groups; ranks are
  // half-integers, so the sums below are exact in double at any sane n.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double midrank = (double(i + 1) + double(j)) / 2.0;  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]] == Label::Anomalous) rank_sum += midrank;
    }
    i = j;
  }
  double u = rank_sum - double(n_anomalous) * double(n_anomalous + 1) / 2.0;
  return u / (double(n_anomalous) * double(n_normal));
}

GridReport run_split_grid(std::span<const Instance> instances,
                          const DatasetSchema& schema, const PrecisionSet& precisions,
                          double r, std::uint64_t seed, std::uint32_t repeats,
                          unsigned threads) {
  if (repeats == 0) throw_error(ErrorKind::Usage, "repeats must be >= 1");
  GridReport report;
  report.precisions = precisions;
  report.r = r;
  report.seed = seed;
  report.repeats = repeats;
  report.source = schema.source;
  report.label_column = schema.label_name;
  report.normal_label = schema.normal_label;

  for (int tenths = 1; tenths <= 9; ++tenths) {
    for (std::uint32_t rep = 0; rep < repeats; ++rep) {
      std::uint64_t cell_seed = seed + rep;
      GridCell cell;
      cell.train_tenths = tenths;
      cell.repeat = rep;
      cell.seed = cell_seed;
      try {
        SplitResult parts = split(instances, double(tenths) / 10.0, cell_seed);
        TrainConfig config{precisions, r, threads};
        Model model = train_model(parts.train, schema, config);
        cell.train_normal = model.train_normal;
        cell.train_anomalous = model.train_anomalous;
        cell.removed = model.removed_contradictory;
        for (std::size_t li = 0; li < precisions.layer_count(); ++li) {
          cell.cnp_per_layer.push_back(model.pattern_count(li, Label::Normal));
          cell.cap_per_layer.push_back(model.pattern_count(li, Label::Anomalous));
        }

        std::vector<Verdict> verdicts = classify_all(parts.test, model, threads);
        std::vector<Label> truth;
        std::vector<Label> predicted;
        std::vector<double> ranking;
        truth.reserve(parts.test.size());
        for (std::size_t i = 0; i < parts.test.size(); ++i) {
          truth.push_back(parts.test[i].label);
          if (parts.test[i].label == Label::Normal) ++cell.test_normal;
          else ++cell.test_anomalous;
          predicted.push_back(verdicts[i].label);
          ranking.push_back(double(ranking_score(verdicts[i].scores)));
        }
        cell.m = metrics(confusion(truth, predicted));
        cell.auc_value = auc(ranking, truth);
      } catch (const Error& e) {
        throw_error(e.kind(), "grid cell " + std::to_string(tenths) + ":" +
                                  std::to_string(10 - tenths) + " (repeat " +
                                  std::to_string(rep) + "): " + e.what());
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

namespace {

std::string metric_field(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

std::string ratio_text(int tenths) {
  return std::to_string(tenths) + ":" + std::to_string(10 - tenths);
}

}  // namespace

std::string render_report_csv(const GridReport& report) {
  std::string out;
  char buf[64];
  out += "# igmd evaluate report\n";
  std::snprintf(buf, sizeof(buf), "%08x", report.data_checksum);
  out += "# data=" + report.source + " crc32=" + buf + "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", report.r);
  out += "# label-column=" + report.label_column +
         " normal-label=" + report.normal_label +
         " precisions=" + report.precisions.to_string() + " r=" + buf +
         " seed=" + std::to_string(report.seed) +
         " repeats=" + std::to_string(report.repeats) + "\n";

  out += "ratio,repeat,seed,train_normal,train_anomalous,test_normal,"
         "test_anomalous,removed";
  for (int level : report.precisions.levels) out += ",cnp_p" + std::to_string(level);
  for (int level : report.precisions.levels) out += ",cap_p" + std::to_string(level);
  out += ",accuracy,recall,precision,auc\n";

  for (const GridCell& c : report.cells) {
    out += ratio_text(c.train_tenths);
    out += "," + std::to_string(c.repeat);
    out += "," + std::to_string(c.seed);
    out += "," + std::to_string(c.train_normal);
    out += "," + std::to_string(c.train_anomalous);
    out += "," + std::to_string(c.test_normal);
    out += "," + std::to_string(c.test_anomalous);
    out += "," + std::to_string(c.removed);
    for (std::size_t count : c.cnp_per_layer) out += "," + std::to_string(count);
    for (std::size_t count : c.cap_per_layer) out += "," + std::to_string(count);
    out += "," + metric_field(c.m.accuracy);
    out += "," + metric_field(c.m.recall);
    out += "," + metric_field(c.m.precision);
    out += "," + metric_field(c.auc_value);
    out += "\n";
  }
  return out;
}

namespace {

struct MeanStd {
  bool any = false;
  double mean = 0.0;
  double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd ms;
  if (values.empty()) return ms;
  ms.any = true;
  double sum = 0.0;
  for (double v : values) sum += v;
  ms.mean = sum / double(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - ms.mean) * (v - ms.mean);
  ms.stddev = std::sqrt(sq / double(values.size()));
  return ms;
}

std::string table_cell(const MeanStd& ms, bool with_std) {
  if (!ms.any) return "-";
  char buf[48];
  if (with_std)
    std::snprintf(buf, sizeof(buf), "%.4f+-%.4f", ms.mean, ms.stddev);
  else
    std::snprintf(buf, sizeof(buf), "%.4f", ms.mean);
  return buf;
}

}  // namespace

std::string render_report_table(const GridReport& report) {
  bool with_std = report.repeats > 1;
  int w = with_std ? 15 : 10;
  char line[256];
  std::string out;
  std::snprintf(line, sizeof(line), "%-6s %-*s %-*s %-*s %-*s\n", "ratio", w,
                "accuracy", w, "recall", w, "precision", w, "auc");
  out += line;
  for (int tenths = 1; tenths <= 9; ++tenths) {
    std::vector<double> acc, rec, prec, aucs;
    for (const GridCell& c : report.cells) {
      if (c.train_tenths != tenths) continue;
      acc.push_back(c.m.accuracy);
      if (c.m.recall) rec.push_back(*c.m.recall);
      if (c.m.precision) prec.push_back(*c.m.precision);
      if (c.auc_value) aucs.push_back(*c.auc_value);
    }
    std::snprintf(line, sizeof(line), "%-6s %-*s %-*s %-*s %-*s\n",
                  ratio_text(tenths).c_str(), w,
                  table_cell(mean_std(acc), with_std).c_str(), w,
                  table_cell(mean_std(rec), with_std).c_str(), w,
                  table_cell(mean_std(prec), with_std).c_str(), w,
                  table_cell(mean_std(aucs), with_std).c_str());
    out += line;
  }
  return out;
}

}  // namespace igmd
