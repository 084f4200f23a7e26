#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace motion::io {

/// Splits text into lines, dropping '\r' and a trailing empty line.
std::vector<std::string_view> split_lines(std::string_view text);

/// Splits one unquoted CSV record on commas and trims surrounding blanks.
std::vector<std::string> split_csv_fields(std::string_view line);

}  // namespace motion::io
