#include "csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

namespace igmd {

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::optional<double> parse_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  for (char c : s) {
    bool ok = (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' ||
              c == 'e' || c == 'E';
    if (!ok) return std::nullopt;
  }
  if (s.front() == '+') s.remove_prefix(1);  // from_chars rejects a leading '+'
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

AttributeValue classify_cell(std::string_view cell) {
  std::string_view t = trim(cell);
  if (t.empty() || t == "NaN") return AttributeValue::missing();
  if (auto num = parse_decimal(t)) return AttributeValue::numeric(*num);
  return AttributeValue::categorical(std::string(t));
}

std::vector<std::vector<std::string>> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::vector<std::vector<std::string>> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    auto cells = split_csv_line(line);
    if (records.empty()) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw_error(ErrorKind::Parse,
                  path + ": ragged row at line " + std::to_string(line_no) +
                      " (" + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(width) + ")");
    }
    records.push_back(std::move(cells));
  }
  if (in.bad()) throw_error(ErrorKind::Io, "read error on '" + path + "'");
  return records;
}

}  // namespace igmd
