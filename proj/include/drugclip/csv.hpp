#pragma once

#include <istream>
#include <string>
#include <vector>

namespace drugclip {

struct Row {
  std::size_t line_no = 0;  // 1-based line of the row's first character
  std::vector<std::string> fields;
};

// RFC-4180 comma-separated rows: quoted fields, doubled quotes, embedded
// commas and newlines.
std::vector<Row> read_csv(std::istream& in);

// Tab-separated rows, no quoting.
std::vector<Row> read_tsv(std::istream& in);

}  // namespace drugclip
