#include "model_io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace igmd {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

const std::array<std::uint32_t, 256> kCrcTable = make_crc_table();

}  // namespace

std::uint32_t crc32(std::string_view bytes) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (unsigned char b : bytes) {
    c = kCrcTable[(c ^ b) & 0xFFu] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

namespace {

bool needs_escape(unsigned char c) {
  return c == '%' || c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
         c == ',';
}

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (needs_escape(c)) {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    } else {
      out.push_back(char(c));
    }
  }
  if (out.empty()) out = "%";  // empty-field marker, decodes back to ""
  return out;
}

std::string unescape_field(std::string_view s) {
  if (s == "%") return "";
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size())
        throw_error(ErrorKind::Format, "truncated escape in model field");
      unsigned value = 0;
      auto [ptr, ec] =
          std::from_chars(s.data() + i + 1, s.data() + i + 3, value, 16);
      if (ec != std::errc() || ptr != s.data() + i + 3)
        throw_error(ErrorKind::Format, "bad escape in model field");
      out.push_back(char(value));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = text_.size();
    line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_no_;
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t sp = line.find(' ', start);
    if (sp == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, sp - start));
    start = sp + 1;
  }
  return fields;
}

[[noreturn]] void malformed(const LineReader& r, const std::string& what) {
  throw_error(ErrorKind::Format,
              "model file line " + std::to_string(r.line_no()) + ": " + what);
}

template <typename T>
T parse_int_field(const LineReader& r, std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    malformed(r, "expected an integer, got '" + std::string(s) + "'");
  return value;
}

double parse_double_field(const LineReader& r, std::string_view s) {
  std::string buf(s);
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size())
    malformed(r, "expected a number, got '" + buf + "'");
  return value;
}

void expect_keyword(const LineReader& r, const std::vector<std::string_view>& f,
                    const char* keyword, std::size_t n_fields) {
  if (f.empty() || f[0] != keyword)
    malformed(r, std::string("expected '") + keyword + "' record");
  if (f.size() != n_fields)
    malformed(r, std::string("'") + keyword + "' record has " +
                     std::to_string(f.size()) + " fields, expected " +
                     std::to_string(n_fields));
}

}  // namespace

std::string serialize_model(const Model& model) {
  std::string body;
  body.reserve(1 << 16);

  body += "source " + escape_field(model.source) + "\n";
  body += "label-column " + std::to_string(model.label_column) + " " +
          escape_field(model.label_name) + "\n";
  body += "normal-label " + escape_field(model.normal_label) + "\n";
  body += "attributes " + std::to_string(model.attribute_names.size()) + "\n";
  for (const auto& name : model.attribute_names) {
    body += "a " + escape_field(name) + "\n";
  }
  body += "precisions " + model.precisions.to_string() + "\n";
  body += "r " + fmt_double(model.guard_band.r) + "\n";

  body += "stats " + std::to_string(model.stats.size()) + "\n";
  for (std::size_t c = 0; c < model.stats.size(); ++c) {
    const auto& s = model.stats.at(c);
    if (s) {
      body += "s " + fmt_double(s->mean) + " " + fmt_double(s->stddev) + " " +
              std::to_string(s->count) + "\n";
    } else {
      body += "s absent\n";
    }
  }

  if (model.guard_band.enabled) {
    body += "guard-band enabled " + fmt_double(model.guard_band.mu_n) + " " +
            fmt_double(model.guard_band.sigma_n) + "\n";
  } else {
    body += "guard-band disabled\n";
  }
  body += "trained " + std::to_string(model.train_normal) + " " +
          std::to_string(model.train_anomalous) + " " +
          std::to_string(model.removed_contradictory) + "\n";

  body += "symbols " + std::to_string(model.symbols.size()) + "\n";
  for (SymbolId id = 0; id < model.symbols.size(); ++id) {
    const Symbol& s = model.symbols.at(id);
    body += "y " + std::to_string(s.column) + " " + tag_to_string(s.tag) + " " +
            escape_field(s.code) + "\n";
  }

  const auto& patterns = model.store.patterns();
  body += "patterns " + std::to_string(patterns.size()) + "\n";
  for (const Pattern& q : patterns) {
    body += "q ";
    body.push_back(q.cls == Label::Normal ? 'N' : 'A');
    body += " " + std::to_string(q.layer) + " " + std::to_string(q.freq) + " ";
    for (std::size_t i = 0; i < q.symbols.size(); ++i) {
      if (i) body.push_back(',');
      body += std::to_string(q.symbols[i]);
    }
    body += "\n";
  }
  body += "end\n";

  char crc_buf[16];
  std::snprintf(crc_buf, sizeof(crc_buf), "%08x", crc32(body));
  std::string out = "igmd-model " + std::to_string(Model::kFormatVersion) + "\n";
  out += "crc32 ";
  out += crc_buf;
  out += "\n";
  out += body;
  return out;
}

Model parse_model(std::string_view bytes) {
  LineReader reader(bytes);
  std::string_view line;

  if (!reader.next(line)) throw_error(ErrorKind::Format, "empty model file");
  {
    auto f = split_fields(line);
    expect_keyword(reader, f, "igmd-model", 2);
    int version = parse_int_field<int>(reader, f[1]);
    if (version != Model::kFormatVersion) {
      throw_error(ErrorKind::Format,
                  "unsupported model version " + std::to_string(version) +
                      " (this build reads version " +
                      std::to_string(Model::kFormatVersion) + ")");
    }
  }
  if (!reader.next(line)) throw_error(ErrorKind::Format, "missing checksum line");
  {
    auto f = split_fields(line);
    expect_keyword(reader, f, "crc32", 2);
    std::uint32_t stated = 0;
    auto [ptr, ec] =
        std::from_chars(f[1].data(), f[1].data() + f[1].size(), stated, 16);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size())
      malformed(reader, "bad checksum value");
    // Everything after this line participates in the checksum.
    std::size_t body_off = 0;
    std::size_t first_nl = bytes.find('\n');
    std::size_t second_nl = bytes.find('\n', first_nl + 1);
    body_off = second_nl + 1;
    std::uint32_t actual = crc32(bytes.substr(body_off));
    if (actual != stated) {
      char expected_hex[16], actual_hex[16];
      std::snprintf(expected_hex, sizeof(expected_hex), "%08x", stated);
      std::snprintf(actual_hex, sizeof(actual_hex), "%08x", actual);
      throw_error(ErrorKind::Format,
                  std::string("model checksum mismatch: file says ") +
                      expected_hex + ", content hashes to " + actual_hex);
    }
  }

  Model model;

  auto read_record = [&](const char* keyword, std::size_t n_fields) {
    if (!reader.next(line))
      throw_error(ErrorKind::Format,
                  std::string("truncated model file, expected '") + keyword + "'");
    auto f = split_fields(line);
    expect_keyword(reader, f, keyword, n_fields);
    return f;
  };

  {
    auto f = read_record("source", 2);
    model.source = unescape_field(f[1]);
  }
  {
    auto f = read_record("label-column", 3);
    model.label_column = parse_int_field<std::size_t>(reader, f[1]);
    model.label_name = unescape_field(f[2]);
  }
  {
    auto f = read_record("normal-label", 2);
    model.normal_label = unescape_field(f[1]);
  }
  std::size_t n_attrs = 0;
  {
    auto f = read_record("attributes", 2);
    n_attrs = parse_int_field<std::size_t>(reader, f[1]);
  }
  for (std::size_t i = 0; i < n_attrs; ++i) {
    auto f = read_record("a", 2);
    model.attribute_names.push_back(unescape_field(f[1]));
  }
  {
    auto f = read_record("precisions", 2);
    model.precisions = PrecisionSet::parse(std::string(f[1]));
  }
  {
    auto f = read_record("r", 2);
    model.guard_band.r = parse_double_field(reader, f[1]);
  }
  {
    auto f = read_record("stats", 2);
    std::size_t n = parse_int_field<std::size_t>(reader, f[1]);
    if (n != n_attrs) malformed(reader, "stats count differs from attribute count");
    std::vector<std::optional<NumericStats>> per_attr(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!reader.next(line)) malformed(reader, "truncated stats block");
      auto sf = split_fields(line);
      if (sf.size() == 2 && sf[0] == "s" && sf[1] == "absent") continue;
      expect_keyword(reader, sf, "s", 4);
      NumericStats ns;
      ns.mean = parse_double_field(reader, sf[1]);
      ns.stddev = parse_double_field(reader, sf[2]);
      ns.count = parse_int_field<std::size_t>(reader, sf[3]);
      per_attr[i] = ns;
    }
    model.stats = AttributeStatsTable(std::move(per_attr));
  }
  {
    if (!reader.next(line)) malformed(reader, "missing guard-band record");
    auto f = split_fields(line);
    if (f.size() == 2 && f[0] == "guard-band" && f[1] == "disabled") {
      model.guard_band.enabled = false;
    } else {
      expect_keyword(reader, f, "guard-band", 4);
      if (f[1] != "enabled") malformed(reader, "guard-band must be enabled|disabled");
      model.guard_band.enabled = true;
      model.guard_band.mu_n = parse_double_field(reader, f[2]);
      model.guard_band.sigma_n = parse_double_field(reader, f[3]);
    }
  }
  {
    auto f = read_record("trained", 4);
    model.train_normal = parse_int_field<std::size_t>(reader, f[1]);
    model.train_anomalous = parse_int_field<std::size_t>(reader, f[2]);
    model.removed_contradictory = parse_int_field<std::size_t>(reader, f[3]);
  }

  std::size_t n_symbols = 0;
  {
    auto f = read_record("symbols", 2);
    n_symbols = parse_int_field<std::size_t>(reader, f[1]);
  }
  for (std::size_t i = 0; i < n_symbols; ++i) {
    auto f = read_record("y", 4);
    Symbol s;
    s.column = parse_int_field<std::uint32_t>(reader, f[1]);
    if (s.column >= n_attrs) malformed(reader, "symbol column out of range");
    s.attribute = model.attribute_names[s.column];
    s.tag = tag_from_string(std::string(f[2]));
    s.code = unescape_field(f[3]);
    SymbolId id = model.symbols.intern(std::move(s));
    if (id != i) malformed(reader, "duplicate symbol entry");
  }

  std::size_t n_patterns = 0;
  {
    auto f = read_record("patterns", 2);
    n_patterns = parse_int_field<std::size_t>(reader, f[1]);
  }
  std::vector<Pattern> patterns;
  patterns.reserve(n_patterns);
  for (std::size_t i = 0; i < n_patterns; ++i) {
    auto f = read_record("q", 5);
    Pattern q;
    if (f[1] == "N") q.cls = Label::Normal;
    else if (f[1] == "A") q.cls = Label::Anomalous;
    else malformed(reader, "pattern class must be N or A");
    q.layer = parse_int_field<int>(reader, f[2]);
    if (std::find(model.precisions.levels.begin(), model.precisions.levels.end(),
                  q.layer) == model.precisions.levels.end())
      malformed(reader, "pattern layer not in the precision set");
    q.freq = parse_int_field<std::uint32_t>(reader, f[3]);
    if (q.freq < 2) malformed(reader, "pattern frequency below 2");
    std::string_view ids = f[4];
    std::size_t start = 0;
    while (start <= ids.size()) {
      std::size_t comma = ids.find(',', start);
      std::string_view tok = ids.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start);
      SymbolId id = parse_int_field<SymbolId>(reader, tok);
      if (id >= n_symbols) malformed(reader, "pattern symbol id out of range");
      if (!q.symbols.empty() && id <= q.symbols.back())
        malformed(reader, "pattern symbols not in canonical order");
      q.symbols.push_back(id);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (q.symbols.empty()) malformed(reader, "empty pattern");
    patterns.push_back(std::move(q));
  }
  {
    auto f = read_record("end", 1);
    (void)f;
  }

  // The store constructor assumes the canonical global order; verify it so a
  // hand-edited file cannot smuggle in a misordered store.
  auto layer_index_of = [&](int level) {
    const auto& levels = model.precisions.levels;
    return std::size_t(std::find(levels.begin(), levels.end(), level) -
                       levels.begin());
  };
  for (std::size_t i = 1; i < patterns.size(); ++i) {
    const Pattern& a = patterns[i - 1];
    const Pattern& b = patterns[i];
    std::size_t la = layer_index_of(a.layer);
    std::size_t lb = layer_index_of(b.layer);
    bool ordered;
    if (la != lb)
      ordered = la < lb;
    else if (a.cls != b.cls)
      ordered = static_cast<int>(a.cls) < static_cast<int>(b.cls);
    else
      ordered = a.symbols < b.symbols;
    if (!ordered)
      throw_error(ErrorKind::Format, "model patterns out of canonical order");
  }

  model.store = PatternStore(std::move(patterns), model.precisions, n_symbols);
  return model;
}

void save_model_file(const Model& model, const std::string& path) {
  std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw_error(ErrorKind::Io, "write failed on '" + path + "'");
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw_error(ErrorKind::Io, "read error on '" + path + "'");
  return parse_model(buf.str());
}

std::uint32_t model_checksum(const Model& model) {
  std::string bytes = serialize_model(model);
  std::size_t first_nl = bytes.find('\n');
  std::size_t second_nl = bytes.find('\n', first_nl + 1);
  return crc32(std::string_view(bytes).substr(second_nl + 1));
}

std::uint32_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return crc32(buf.str());
}

}  // namespace igmd
