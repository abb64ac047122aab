#include "igmd.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "csv.hpp"
#include "evaluate.hpp"
#include "model_io.hpp"
#include "pipeline.hpp"

struct igmd_dataset {
  igmd::DatasetSchema schema;
  std::vector<igmd::Instance> instances;
  std::string warnings_text;
  std::size_t normal_count = 0;
};

struct igmd_model {
  igmd::Model model;
  std::uint32_t checksum = 0;
  std::string warnings_text;
};

namespace {

thread_local std::string tl_last_error;

igmd_status kind_to_status(igmd::ErrorKind kind) {
  switch (kind) {
    case igmd::ErrorKind::Usage: return IGMD_ERR_USAGE;
    case igmd::ErrorKind::Io: return IGMD_ERR_IO;
    case igmd::ErrorKind::Parse: return IGMD_ERR_PARSE;
    case igmd::ErrorKind::Schema: return IGMD_ERR_SCHEMA;
    case igmd::ErrorKind::Format: return IGMD_ERR_FORMAT;
    case igmd::ErrorKind::Internal: return IGMD_ERR_INTERNAL;
  }
  return IGMD_ERR_INTERNAL;
}

igmd_status fail_usage(const char* message) {
  tl_last_error = message;
  return IGMD_ERR_USAGE;
}

template <typename Fn>
igmd_status guarded(Fn&& fn) {
  try {
    tl_last_error.clear();
    fn();
    return IGMD_OK;
  } catch (const igmd::Error& e) {
    tl_last_error = e.what();
    return kind_to_status(e.kind());
  } catch (const std::exception& e) {
    tl_last_error = e.what();
    return IGMD_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::string join_warnings(const igmd::Warnings& warnings) {
  std::string out;
  for (const auto& w : warnings) {
    out += w;
    out.push_back('\n');
  }
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace

extern "C" {

const char* igmd_version(void) { return "1.0.0"; }

const char* igmd_status_name(igmd_status status) {
  switch (status) {
    case IGMD_OK: return "ok";
    case IGMD_ERR_USAGE: return "usage";
    case IGMD_ERR_IO: return "io";
    case IGMD_ERR_PARSE: return "parse";
    case IGMD_ERR_SCHEMA: return "schema";
    case IGMD_ERR_FORMAT: return "format";
    case IGMD_ERR_INTERNAL: return "internal";
  }
  return "?";
}

const char* igmd_last_error(void) { return tl_last_error.c_str(); }

void igmd_string_free(char* s) { std::free(s); }

igmd_status igmd_dataset_open_csv(const char* path, const char* label_column,
                                  int has_header, const char* normal_label,
                                  igmd_dataset** out) {
  if (!path || !out) return fail_usage("igmd_dataset_open_csv: null argument");
  *out = nullptr;
  return guarded([&] {
    auto ds = std::make_unique<igmd_dataset>();
    igmd::RawDataset raw;
    if (label_column) {
      raw = igmd::load_csv(path, igmd::ColumnRef::parse(label_column),
                           has_header != 0);
    } else {
      // Default: the last column. Peek at the width first.
      auto records = igmd::read_csv_file(path);
      if (records.empty())
        igmd::throw_error(igmd::ErrorKind::Parse,
                          std::string(path) + ": empty file");
      raw = igmd::load_csv(path, igmd::ColumnRef::index(records[0].size() - 1),
                           has_header != 0);
    }
    igmd::Warnings warnings;
    std::string normal = normal_label ? normal_label : "Normal";
    ds->instances = igmd::binarize_labels(raw, normal, &warnings);
    ds->schema.attribute_names = std::move(raw.attribute_names);
    ds->schema.label_name = std::move(raw.label_name);
    ds->schema.label_column = raw.label_column;
    ds->schema.normal_label = normal;
    ds->schema.source = path;
    for (const auto& inst : ds->instances) {
      if (inst.label == igmd::Label::Normal) ++ds->normal_count;
    }
    ds->warnings_text = join_warnings(warnings);
    *out = ds.release();
  });
}

size_t igmd_dataset_row_count(const igmd_dataset* ds) {
  return ds ? ds->instances.size() : 0;
}

size_t igmd_dataset_attribute_count(const igmd_dataset* ds) {
  return ds ? ds->schema.attribute_names.size() : 0;
}

size_t igmd_dataset_normal_count(const igmd_dataset* ds) {
  return ds ? ds->normal_count : 0;
}

const char* igmd_dataset_warnings(const igmd_dataset* ds) {
  return ds ? ds->warnings_text.c_str() : "";
}

void igmd_dataset_close(igmd_dataset* ds) { delete ds; }

void igmd_train_options_init(igmd_train_options* opts) {
  if (!opts) return;
  opts->precisions = nullptr;
  opts->r = -1.0;
  opts->train_fraction = 0.0;
  opts->seed = 42;
}

igmd_status igmd_train(const igmd_dataset* ds, const igmd_train_options* opts,
                       igmd_model** out) {
  if (!ds || !out) return fail_usage("igmd_train: null argument");
  *out = nullptr;
  return guarded([&] {
    igmd_train_options defaults;
    igmd_train_options_init(&defaults);
    const igmd_train_options& o = opts ? *opts : defaults;

    igmd::TrainConfig config;
    config.precisions =
        igmd::PrecisionSet::parse(o.precisions ? o.precisions : "0,1");
    config.r = o.r < 0 ? 3.0 : o.r;

    auto m = std::make_unique<igmd_model>();
    igmd::Warnings warnings;
    if (o.train_fraction > 0.0 && o.train_fraction < 1.0) {
      igmd::SplitResult parts =
          igmd::split(ds->instances, o.train_fraction, o.seed);
      m->model = igmd::train_model(parts.train, ds->schema, config, &warnings);
    } else {
      m->model = igmd::train_model(ds->instances, ds->schema, config, &warnings);
    }
    m->checksum = igmd::model_checksum(m->model);
    m->warnings_text = join_warnings(warnings);
    *out = m.release();
  });
}

igmd_status igmd_model_save(const igmd_model* m, const char* path) {
  if (!m || !path) return fail_usage("igmd_model_save: null argument");
  return guarded([&] { igmd::save_model_file(m->model, path); });
}

igmd_status igmd_model_open(const char* path, igmd_model** out) {
  if (!path || !out) return fail_usage("igmd_model_open: null argument");
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<igmd_model>();
    m->model = igmd::load_model_file(path);
    m->checksum = igmd::model_checksum(m->model);
    *out = m.release();
  });
}

void igmd_model_close(igmd_model* m) { delete m; }

uint32_t igmd_model_checksum(const igmd_model* m) {
  return m ? m->checksum : 0;
}

igmd_status igmd_model_summary(const igmd_model* m, char** out_text) {
  if (!m || !out_text) return fail_usage("igmd_model_summary: null argument");
  return guarded([&] {
    *out_text = copy_string(igmd::model_summary(m->model, m->checksum));
  });
}

const char* igmd_model_warnings(const igmd_model* m) {
  return m ? m->warnings_text.c_str() : "";
}

igmd_status igmd_predict_csv(const igmd_model* m, const char* data_path,
                             int has_header, char** out_csv) {
  if (!m || !data_path || !out_csv)
    return fail_usage("igmd_predict_csv: null argument");
  *out_csv = nullptr;
  return guarded([&] {
    auto instances = igmd::load_for_model(data_path, has_header != 0, m->model);
    auto verdicts = igmd::classify_all(instances, m->model);
    *out_csv = copy_string(
        igmd::render_verdicts_csv(verdicts, m->model, m->checksum, data_path));
  });
}

igmd_status igmd_explain(const igmd_model* m, const char* data_path,
                         int has_header, uint64_t instance_id, char** out_text) {
  if (!m || !data_path || !out_text) return fail_usage("igmd_explain: null argument");
  *out_text = nullptr;
  return guarded([&] {
    auto instances = igmd::load_for_model(data_path, has_header != 0, m->model);
    if (instance_id >= instances.size()) {
      igmd::throw_error(igmd::ErrorKind::Usage,
                        "instance id " + std::to_string(instance_id) +
                            " out of range (" + std::to_string(instances.size()) +
                            " rows)");
    }
    igmd::Verdict v = igmd::classify_instance(instances[instance_id], m->model,
                                              /*collect_matches=*/true);
    *out_text = copy_string(igmd::explain(v, m->model, instance_id));
  });
}

void igmd_evaluate_options_init(igmd_evaluate_options* opts) {
  if (!opts) return;
  opts->precisions = nullptr;
  opts->r = -1.0;
  opts->seed = 42;
  opts->repeats = 1;
}

igmd_status igmd_evaluate(const igmd_dataset* ds,
                          const igmd_evaluate_options* opts,
                          char** out_report_csv, char** out_table_text) {
  if (!ds) return fail_usage("igmd_evaluate: null dataset");
  if (out_report_csv) *out_report_csv = nullptr;
  if (out_table_text) *out_table_text = nullptr;
  return guarded([&] {
    igmd_evaluate_options defaults;
    igmd_evaluate_options_init(&defaults);
    const igmd_evaluate_options& o = opts ? *opts : defaults;

    igmd::PrecisionSet precisions =
        igmd::PrecisionSet::parse(o.precisions ? o.precisions : "0,1");
    double r = o.r < 0 ? 3.0 : o.r;
    std::uint32_t repeats = o.repeats == 0 ? 1 : o.repeats;

    igmd::GridReport report = igmd::run_split_grid(
        ds->instances, ds->schema, precisions, r, o.seed, repeats);
    report.data_checksum = igmd::file_checksum(ds->schema.source);
    if (out_report_csv)
      *out_report_csv = copy_string(igmd::render_report_csv(report));
    if (out_table_text)
      *out_table_text = copy_string(igmd::render_report_table(report));
  });
}

}  // extern "C"
