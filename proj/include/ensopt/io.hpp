#pragma once
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ensopt {

// Shortest round-trip decimal form of x (std::to_chars). Deterministic and
// reparses to the identical double, which is what the byte-reproducibility
// and record-then-replay contracts lean on.
std::string fmt_double(double x);

// RFC-4180 field quoting: quote when the field holds a comma, quote, or
// newline; embedded quotes doubled.
std::string csv_escape(const std::string& field);

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    void row(const std::vector<std::string>& fields);
    ~CsvWriter();

private:
    std::ofstream out_;
};

// Minimal CSV reader for the project's own files (quoted fields supported).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ensopt
