#include "ideanet/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ideanet/errors.hpp"

namespace ideanet {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                const std::string& origin) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  int lineno = 1;
  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    // Skip blank lines.
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(row);
    row.clear();
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++lineno;
        field += c;
      }
    } else {
      switch (c) {
        case '"':
          if (field_started && !field.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": stray quote inside unquoted field");
          in_quotes = true;
          field_started = true;
          break;
        case ',':
          end_field();
          break;
        case '\r':
          break;
        case '\n':
          end_row();
          ++lineno;
          break;
        default:
          field += c;
          field_started = true;
      }
    }
  }
  if (in_quotes)
    throw ParseError(origin + ": unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path), path.string());
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write file: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace ideanet
