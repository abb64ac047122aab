#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace igmd {

/// Splits one CSV record into cells. Supports RFC-4180 style double quoting;
/// a bare CR before the line end is stripped.
std::vector<std::string> split_csv_line(std::string_view line);

/// Strict finite-decimal parse: optional sign, digits, optional fraction and
/// exponent. Rejects hex, inf and nan spellings, and partial matches.
std::optional<double> parse_decimal(std::string_view s);

/// Classifies a trimmed cell: "" and the exact token "NaN" are Missing,
/// decimal numbers are Numeric, everything else Categorical.
AttributeValue classify_cell(std::string_view cell);

std::string_view trim(std::string_view s);

/// Reads a whole delimited file into records of raw cells. Throws on
/// unreadable files and on ragged rows (message carries the 1-based line
/// number).
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

}  // namespace igmd
