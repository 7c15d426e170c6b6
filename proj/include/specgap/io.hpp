#pragma once

#include <map>
#include <string>
#include <vector>

#include "specgap/errors.hpp"

namespace specgap {

// Flat sectioned key-value config: "[section]" lines and "key = value" pairs.
// No expressions. Keys are reported with their line numbers so validation
// errors can point at the offending line.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;

    // Normalized serialization: sections and keys sorted, canonical spacing.
    std::string normalized() const;
    // FNV-1a hash of the normalized form, hex.
    std::string hash() const;

    int line_of(const std::string& section, const std::string& key) const;
    const std::string& origin() const { return origin_; }

    void set(const std::string& section, const std::string& key, const std::string& value);

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> data_;
    std::string origin_;
};

// One tidy CSV table: fixed column set, rows of doubles/strings already
// formatted. Wrote with RFC-4180 quoting, dot decimals, '\n' line ends.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, const std::string& path);
std::string format_double(double v);  // shortest round-trip decimal form
void write_text(const std::string& text, const std::string& path);

} // namespace specgap
