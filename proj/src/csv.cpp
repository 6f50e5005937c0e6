#include "drugclip/csv.hpp"

#include <iterator>

namespace drugclip {

std::vector<Row> read_csv(std::istream& in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  std::vector<Row> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    Row row;
    row.line_no = line;
    std::string field;
    bool in_quotes = false;
    bool row_done = false;
    while (i < text.size() && !row_done) {
      char c = text[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field += '"';
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
          ++i;
        }
      } else if (c == '"') {
        in_quotes = true;
        ++i;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        ++i;
      } else if (c == '\r') {
        ++i;
      } else if (c == '\n') {
        ++line;
        ++i;
        row_done = true;
      } else {
        field += c;
        ++i;
      }
    }
    row.fields.push_back(std::move(field));
    // skip blank lines (a lone newline yields one empty field)
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Row> read_tsv(std::istream& in) {
  std::vector<Row> rows;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    Row row;
    row.line_no = line;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = raw.find('\t', start);
      if (tab == std::string::npos) {
        row.fields.push_back(raw.substr(start));
        break;
      }
      row.fields.push_back(raw.substr(start, tab - start));
      start = tab + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace drugclip
