#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "csv.hpp"

namespace igmd {

ColumnRef ColumnRef::parse(const std::string& text) {
  if (!text.empty() &&
      std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return ColumnRef::index(std::stoull(text));
  }
  return ColumnRef::name(text);
}

std::string ColumnRef::describe() const {
  if (std::holds_alternative<std::string>(ref)) return std::get<std::string>(ref);
  return "#" + std::to_string(std::get<std::size_t>(ref));
}

namespace {

std::size_t resolve_label_column(const ColumnRef& label,
                                 const std::vector<std::string>& header,
                                 std::size_t width, bool has_header,
                                 const std::string& path) {
  if (std::holds_alternative<std::size_t>(label.ref)) {
    std::size_t idx = std::get<std::size_t>(label.ref);
    if (idx >= width) {
      throw_error(ErrorKind::Usage, path + ": label column index " +
                                        std::to_string(idx) + " out of range (" +
                                        std::to_string(width) + " columns)");
    }
    return idx;
  }
  const std::string& name = std::get<std::string>(label.ref);
  if (!has_header) {
    throw_error(ErrorKind::Usage,
                "label column '" + name +
                    "' given by name but the file has no header; use an index");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  // A purely numeric selector that matched no header name falls back to an
  // index.
  if (auto num = parse_decimal(name); num && *num >= 0 && *num < double(width) &&
                                      *num == std::floor(*num)) {
    return static_cast<std::size_t>(*num);
  }
  throw_error(ErrorKind::Usage, path + ": label column '" + name + "' not found");
}

}  // namespace

RawDataset load_csv(const std::string& path, const ColumnRef& label_column,
                    bool has_header) {
  auto records = read_csv_file(path);
  RawDataset ds;
  if (records.empty()) {
    if (has_header)
      throw_error(ErrorKind::Parse, path + ": empty file, expected a header row");
    return ds;
  }

  std::size_t width = records[0].size();
  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (has_header) {
    header.reserve(width);
    for (auto& cell : records[0]) header.emplace_back(trim(cell));
    first_data = 1;
  }
  ds.label_column = resolve_label_column(label_column, header, width, has_header, path);

  for (std::size_t c = 0; c < width; ++c) {
    std::string name = has_header ? header[c] : "col" + std::to_string(c);
    if (c == ds.label_column) {
      ds.label_name = std::move(name);
    } else {
      ds.attribute_names.push_back(std::move(name));
    }
  }

  ds.rows.reserve(records.size() - first_data);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    RawRow row;
    row.values.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == ds.label_column) {
        row.label_cell = std::string(trim(records[r][c]));
      } else {
        row.values.push_back(classify_cell(records[r][c]));
      }
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

std::vector<Instance> binarize_labels(const RawDataset& raw,
                                      const std::string& normal_label,
                                      Warnings* warnings) {
  if (normal_label.empty())
    throw_error(ErrorKind::Usage, "normal label must be non-empty");
  std::vector<Instance> out;
  out.reserve(raw.rows.size());
  std::size_t normals = 0;
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    Instance inst;
    inst.id = i;
    inst.label = raw.rows[i].label_cell == normal_label ? Label::Normal
                                                        : Label::Anomalous;
    if (inst.label == Label::Normal) ++normals;
    inst.values = raw.rows[i].values;
    out.push_back(std::move(inst));
  }
  if (!out.empty() && normals == 0) {
    warn(warnings, "no instance matched the normal label '" + normal_label +
                       "'; every row is Anomalous");
  }
  return out;
}

AttributeStatsTable compute_stats(std::span<const Instance> train) {
  if (train.empty())
    throw_error(ErrorKind::Usage, "cannot compute statistics on an empty training set");
  std::size_t n_attrs = train.front().values.size();
  std::vector<std::optional<NumericStats>> per_attr(n_attrs);
  for (std::size_t c = 0; c < n_attrs; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const Instance& inst : train) {
      const AttributeValue& v = inst.values[c];
      if (v.is_numeric()) {
        sum += v.number;
        ++count;
      }
    }
    if (count == 0) continue;  // absent stats; discretizer emits Missing
    double mean = sum / double(count);
    double sq = 0.0;
    for (const Instance& inst : train) {
      const AttributeValue& v = inst.values[c];
      if (v.is_numeric()) {
        double d = v.number - mean;
        sq += d * d;
      }
    }
    NumericStats s;
    s.mean = mean;
    s.stddev = std::sqrt(sq / double(count));
    s.count = count;
    per_attr[c] = s;
  }
  return AttributeStatsTable(std::move(per_attr));
}

namespace {

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

// Explicit Fisher-Yates with modulo draws: std::shuffle and
// std::uniform_int_distribution are implementation-defined, which would break
// the cross-platform determinism contract.
void deterministic_shuffle(std::vector<std::size_t>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(gen() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

SplitResult split(std::span<const Instance> instances, double train_fraction,
                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw_error(ErrorKind::Usage, "train fraction must lie in (0,1)");

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < instances.size(); ++i) {
    by_class[static_cast<std::size_t>(instances[i].label)].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < 2) {
      throw_error(ErrorKind::Usage,
                  std::string("cannot split: class ") +
                      label_name(static_cast<Label>(c)) + " has " +
                      std::to_string(by_class[c].size()) +
                      " instance(s), need at least 2");
    }
  }

  std::mt19937_64 gen(seed);
  SplitResult result;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    deterministic_shuffle(idx, gen);
    std::size_t n_train = round_half_up(double(idx.size()) * train_fraction);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      (k < n_train ? result.train : result.test).push_back(instances[idx[k]]);
    }
  }
  auto by_id = [](const Instance& a, const Instance& b) { return a.id < b.id; };
  std::sort(result.train.begin(), result.train.end(), by_id);
  std::sort(result.test.begin(), result.test.end(), by_id);
  return result;
}

}  // namespace igmd
