// igmd — train, predict, explain, and evaluate IG-MD flow classifiers.
//
// Exit codes: 0 success, 2 usage error, 3 data error (unreadable/malformed
// input, schema or model-file problems), 4 internal error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "igmd.h"

namespace {

int exit_code_for(igmd_status status) {
  switch (status) {
    case IGMD_OK:
      return 0;
    case IGMD_ERR_USAGE:
      return 2;
    case IGMD_ERR_IO:
    case IGMD_ERR_PARSE:
    case IGMD_ERR_SCHEMA:
    case IGMD_ERR_FORMAT:
      return 3;
    default:
      return 4;
  }
}

int report_failure(const char* what, igmd_status status) {
  std::cerr << "igmd: " << what << " failed (" << igmd_status_name(status)
            << "): " << igmd_last_error() << "\n";
  return exit_code_for(status);
}

void print_warnings(const char* warnings) {
  if (warnings && warnings[0] != '\0') {
    std::cerr << "warning: ";
    for (const char* p = warnings; *p; ++p) {
      std::cerr << *p;
      if (*p == '\n') std::cerr << "warning: ";
    }
    std::cerr << "\n";
  }
}

bool write_file(const std::string& path, const char* content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

struct DataOptions {
  std::string data;
  std::string label_column;  // empty -> last column
  std::string normal_label = "Normal";
  bool no_header = false;
};

void add_data_options(CLI::App* cmd, DataOptions& opts, bool with_label) {
  cmd->add_option("--data", opts.data, "input CSV file")->required();
  cmd->add_flag("--no-header", opts.no_header,
                "the CSV has no header row (label column must be an index)");
  if (with_label) {
    cmd->add_option("--label-column", opts.label_column,
                    "label column name or 0-based index (default: last column)");
    cmd->add_option("--normal-label", opts.normal_label,
                    "label text of the Normal class (exact, case-sensitive)");
  }
}

igmd_status open_dataset(const DataOptions& opts, igmd_dataset** out) {
  igmd_status st = igmd_dataset_open_csv(
      opts.data.c_str(),
      opts.label_column.empty() ? nullptr : opts.label_column.c_str(),
      opts.no_header ? 0 : 1, opts.normal_label.c_str(), out);
  if (st == IGMD_OK) print_warnings(igmd_dataset_warnings(*out));
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IG-MD: coherent-pattern flow classification with "
               "multi-granular discretization"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "learn a pattern model from labeled flows");
  DataOptions train_data;
  add_data_options(train, train_data, /*with_label=*/true);
  std::string train_model_path;
  std::string train_precisions = "0,1";
  double train_r = 3.0;
  double train_fraction = 0.0;
  std::uint64_t train_seed = 42;
  train->add_option("--model", train_model_path, "output model file")->required();
  train->add_option("--precisions", train_precisions,
                    "comma list of z-score rounding precisions");
  train->add_option("--r", train_r, "guard-band width r (threshold mu_N - r*sigma_N)");
  train->add_option("--train-fraction", train_fraction,
                    "train on a stratified fraction of the data (0 = all rows)");
  train->add_option("--seed", train_seed, "seed for --train-fraction subsetting");

  // predict: the model owns precisions, r, and stats; no overrides here.
  auto* predict = app.add_subcommand("predict", "classify flows with a trained model");
  DataOptions predict_data;
  add_data_options(predict, predict_data, /*with_label=*/false);
  std::string predict_model_path;
  std::string predict_out;
  predict->add_option("--model", predict_model_path, "model file")->required();
  predict->add_option("--out", predict_out, "output verdicts CSV")->required();

  // explain
  auto* explain = app.add_subcommand("explain", "show why one flow was classified");
  DataOptions explain_data;
  add_data_options(explain, explain_data, /*with_label=*/false);
  std::string explain_model_path;
  std::uint64_t explain_id = 0;
  explain->add_option("--model", explain_model_path, "model file")->required();
  explain->add_option("--id", explain_id, "0-based data-row ordinal")->required();

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "run the nine-ratio split grid and report metrics");
  DataOptions eval_data;
  add_data_options(evaluate, eval_data, /*with_label=*/true);
  std::string eval_out;
  std::string eval_precisions = "0,1";
  double eval_r = 3.0;
  std::uint64_t eval_seed = 42;
  std::uint32_t eval_repeats = 1;
  evaluate->add_option("--out", eval_out, "output report CSV (omit for table only)");
  evaluate->add_option("--precisions", eval_precisions,
                       "comma list of z-score rounding precisions");
  evaluate->add_option("--r", eval_r, "guard-band width r");
  evaluate->add_option("--seed", eval_seed, "base split seed; repeat j uses seed+j");
  evaluate->add_option("--repeats", eval_repeats, "seeds per ratio (mean +- std output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand(train)) {
    igmd_dataset* ds = nullptr;
    igmd_status st = open_dataset(train_data, &ds);
    if (st != IGMD_OK) return report_failure("train", st);

    igmd_train_options opts;
    igmd_train_options_init(&opts);
    opts.precisions = train_precisions.c_str();
    opts.r = train_r;
    opts.train_fraction = train_fraction;
    opts.seed = train_seed;

    igmd_model* model = nullptr;
    st = igmd_train(ds, &opts, &model);
    igmd_dataset_close(ds);
    if (st != IGMD_OK) return report_failure("train", st);
    print_warnings(igmd_model_warnings(model));

    st = igmd_model_save(model, train_model_path.c_str());
    if (st != IGMD_OK) {
      igmd_model_close(model);
      return report_failure("model save", st);
    }
    char* summary = nullptr;
    if (igmd_model_summary(model, &summary) == IGMD_OK && summary) {
      std::cout << summary;
      igmd_string_free(summary);
    }
    std::cout << "wrote " << train_model_path << "\n";
    igmd_model_close(model);
    return 0;
  }

  if (app.got_subcommand(predict)) {
    igmd_model* model = nullptr;
    igmd_status st = igmd_model_open(predict_model_path.c_str(), &model);
    if (st != IGMD_OK) return report_failure("model open", st);

    char* csv = nullptr;
    st = igmd_predict_csv(model, predict_data.data.c_str(),
                          predict_data.no_header ? 0 : 1, &csv);
    igmd_model_close(model);
    if (st != IGMD_OK) return report_failure("predict", st);

    bool ok = write_file(predict_out, csv);
    igmd_string_free(csv);
    if (!ok) {
      std::cerr << "igmd: cannot write " << predict_out << "\n";
      return 3;
    }
    std::cout << "wrote " << predict_out << "\n";
    return 0;
  }

  if (app.got_subcommand(explain)) {
    igmd_model* model = nullptr;
    igmd_status st = igmd_model_open(explain_model_path.c_str(), &model);
    if (st != IGMD_OK) return report_failure("model open", st);

    char* text = nullptr;
    st = igmd_explain(model, explain_data.data.c_str(),
                      explain_data.no_header ? 0 : 1, explain_id, &text);
    igmd_model_close(model);
    if (st != IGMD_OK) return report_failure("explain", st);
    std::cout << text;
    igmd_string_free(text);
    return 0;
  }

  // evaluate
  igmd_dataset* ds = nullptr;
  igmd_status st = open_dataset(eval_data, &ds);
  if (st != IGMD_OK) return report_failure("evaluate", st);

  igmd_evaluate_options opts;
  igmd_evaluate_options_init(&opts);
  opts.precisions = eval_precisions.c_str();
  opts.r = eval_r;
  opts.seed = eval_seed;
  opts.repeats = eval_repeats;

  char* report_csv = nullptr;
  char* table = nullptr;
  st = igmd_evaluate(ds, &opts, eval_out.empty() ? nullptr : &report_csv, &table);
  igmd_dataset_close(ds);
  if (st != IGMD_OK) return report_failure("evaluate", st);

  std::cout << table;
  igmd_string_free(table);
  if (!eval_out.empty()) {
    bool ok = write_file(eval_out, report_csv);
    igmd_string_free(report_csv);
    if (!ok) {
      std::cerr << "igmd: cannot write " << eval_out << "\n";
      return 3;
    }
    std::cout << "wrote " << eval_out << "\n";
  }
  return 0;
}
