#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ideanet {

/// RFC-4180-style CSV reader (quoted fields, embedded commas/newlines).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);
std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                const std::string& origin = "<string>");

/// Quote a field if it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

/// Write via temp file + rename so readers never see partial output.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// 10 significant digits ("%.10g"); keeps CSV output byte-reproducible.
std::string format_real(double v);

std::string read_text(const std::filesystem::path& path);

std::vector<std::string> split(const std::string& s, char sep);

}  // namespace ideanet
