#include "pipeline.hpp"

#include <cstdio>

#include "csv.hpp"
#include "parallel.hpp"

namespace igmd {

Model train_model(std::span<const Instance> train, const DatasetSchema& schema,
                  const TrainConfig& config, Warnings* warnings) {
  if (train.empty())
    throw_error(ErrorKind::Usage, "cannot train on an empty instance set");

  Model model;
  model.attribute_names = schema.attribute_names;
  model.label_name = schema.label_name;
  model.label_column = schema.label_column;
  model.normal_label = schema.normal_label;
  model.source = schema.source;
  model.precisions = config.precisions;
  model.guard_band.r = config.r;

  model.stats = compute_stats(train);

  std::vector<SymbolicInstance> symbolic;
  symbolic.reserve(train.size());
  for (const Instance& inst : train) {
    symbolic.push_back(discretize_instance(inst, model.attribute_names,
                                           model.stats, model.precisions,
                                           model.symbols));
  }
  auto old_to_new = model.symbols.finalize();
  for (auto& si : symbolic) remap_instance(si, old_to_new);

  FilterResult filtered = anti_contradiction_filter(std::move(symbolic), warnings);
  model.removed_contradictory = filtered.removed_ids.size();
  for (const auto& si : filtered.kept) {
    if (si.label == Label::Normal)
      ++model.train_normal;
    else
      ++model.train_anomalous;
  }

  model.store = build_store(filtered.kept, model.precisions, model.symbols.size(),
                            warnings, config.threads);

  std::vector<SymbolicInstance> normals;
  normals.reserve(model.train_normal);
  for (const auto& si : filtered.kept) {
    if (si.label == Label::Normal) normals.push_back(si);
  }
  model.guard_band =
      calibrate_guard_band(normals, model, config.r, warnings, config.threads);
  return model;
}

Verdict classify_instance(const Instance& inst, const Model& model,
                          bool collect_matches) {
  SymbolicInstance si = discretize_instance_frozen(
      inst, model.attribute_names, model.stats, model.precisions, model.symbols);
  return classify(score(si, model, collect_matches), model.guard_band);
}

std::vector<Verdict> classify_all(std::span<const Instance> instances,
                                  const Model& model, unsigned threads) {
  std::vector<Verdict> out(instances.size());
  unsigned workers =
      effective_threads(threads, instances.size() * model.store.patterns().size());
  run_workers(workers, [&](unsigned t) {
    for (std::size_t i = t; i < instances.size(); i += workers) {
      out[i] = classify_instance(instances[i], model, /*collect_matches=*/false);
    }
  });
  return out;
}

std::vector<Instance> load_for_model(const std::string& path, bool has_header,
                                     const Model& model) {
  auto records = read_csv_file(path);
  const std::size_t n_attrs = model.attribute_names.size();

  std::size_t first_data = has_header ? 1 : 0;
  if (has_header && records.empty())
    throw_error(ErrorKind::Parse, path + ": empty file, expected a header row");

  bool with_label;
  if (records.empty()) {
    with_label = true;  // no rows to read either way
  } else {
    std::size_t width = records[0].size();
    if (width == n_attrs + 1) with_label = true;
    else if (width == n_attrs) with_label = false;
    else
      throw_error(ErrorKind::Schema,
                  path + ": has " + std::to_string(width) +
                      " columns, model expects " + std::to_string(n_attrs) +
                      " attributes (label column optional)");
  }

  if (has_header && !records.empty()) {
    const auto& header = records[0];
    std::size_t feature = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::string name(trim(header[c]));
      if (with_label && c == model.label_column) {
        if (name != model.label_name)
          throw_error(ErrorKind::Schema, path + ": column " + std::to_string(c) +
                                             ": expected label column '" +
                                             model.label_name + "', got '" +
                                             name + "'");
        continue;
      }
      if (name != model.attribute_names[feature])
        throw_error(ErrorKind::Schema,
                    path + ": column " + std::to_string(c) + ": expected '" +
                        model.attribute_names[feature] + "', got '" + name + "'");
      ++feature;
    }
  }

  std::vector<Instance> out;
  out.reserve(records.size() - std::min(first_data, records.size()));
  for (std::size_t r = first_data; r < records.size(); ++r) {
    Instance inst;
    inst.id = r - first_data;
    inst.values.reserve(n_attrs);
    for (std::size_t c = 0; c < records[r].size(); ++c) {
      if (with_label && c == model.label_column) continue;
      inst.values.push_back(classify_cell(records[r][c]));
    }
    out.push_back(std::move(inst));
  }
  return out;
}

namespace {

std::string crc_hex(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", crc);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string render_verdicts_csv(std::span<const Verdict> verdicts,
                                const Model& model, std::uint32_t model_crc,
                                const std::string& data_path) {
  std::string out;
  out += "# igmd predict\n";
  out += "# model crc32=" + crc_hex(model_crc) +
         " precisions=" + model.precisions.to_string() +
         " r=" + fmt_g(model.guard_band.r) +
         " normal-label=" + model.normal_label + "\n";
  out += "# data=" + data_path + "\n";
  out += "id,label,rule,ns,as,ranking_score\n";
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const Verdict& v = verdicts[i];
    out += std::to_string(i);
    out += ",";
    out += label_name(v.label);
    out += ",";
    out += rule_name(v.rule);
    out += "," + std::to_string(v.scores.ns);
    out += "," + std::to_string(v.scores.as);
    out += "," + std::to_string(ranking_score(v.scores));
    out += "\n";
  }
  return out;
}

std::string model_summary(const Model& model, std::uint32_t model_crc) {
  std::string out;
  out += "model: " + std::to_string(model.attribute_names.size()) +
         " attributes, precisions " + model.precisions.to_string() +
         ", r=" + fmt_g(model.guard_band.r) + "\n";
  out += "trained on " +
         std::to_string(model.train_normal + model.train_anomalous) +
         " instances (" + std::to_string(model.train_normal) + " normal / " +
         std::to_string(model.train_anomalous) + " anomalous), removed " +
         std::to_string(model.removed_contradictory) + " contradictory\n";
  out += "patterns:";
  for (std::size_t li = 0; li < model.precisions.layer_count(); ++li) {
    out += std::string(li ? ";" : "") + " p=" +
           std::to_string(model.precisions.levels[li]) + ": " +
           std::to_string(model.pattern_count(li, Label::Normal)) + " CNP / " +
           std::to_string(model.pattern_count(li, Label::Anomalous)) + " CAP";
  }
  out += "\n";
  const GuardBand& gb = model.guard_band;
  if (gb.enabled) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "guard band: mu_N=%.6g sigma_N=%.6g threshold=%.6g\n", gb.mu_n,
                  gb.sigma_n, gb.threshold());
    out += buf;
  } else {
    out += "guard band: disabled\n";
  }
  out += "checksum: crc32=" + crc_hex(model_crc) + "\n";
  return out;
}

}  // namespace igmd
