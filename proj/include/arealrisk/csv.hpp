#ifndef AREALRISK_CSV_HPP
#define AREALRISK_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace arealrisk {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index for a header name; throws InputError if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Writes header + rows atomically (temp file, then rename).
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

// strtod with error context ("file.csv row 12, column mean").
double parse_double(const std::string& field, const std::string& context);
long parse_long(const std::string& field, const std::string& context);

// Atomic whole-file write used for every emitted artifact.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

// 64-bit FNV-1a of a file's bytes, as fixed-width hex; used in run manifests.
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace arealrisk

#endif
