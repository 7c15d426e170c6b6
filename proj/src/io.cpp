#include "specgap/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specgap {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": empty section name");
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": key outside any [section]");
        if (c.data_[section].count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        c.data_[section][key] = {value, lineno};
    }
    return c;
}

bool Config::has(const std::string& s, const std::string& k) const {
    auto it = data_.find(s);
    return it != data_.end() && it->second.count(k) > 0;
}

std::string Config::get(const std::string& s, const std::string& k) const {
    auto it = data_.find(s);
    if (it == data_.end() || !it->second.count(k))
        throw ConfigError(origin_ + ": missing required key [" + s + "] " + k);
    return it->second.at(k).value;
}

std::string Config::get_or(const std::string& s, const std::string& k,
                           const std::string& fb) const {
    return has(s, k) ? get(s, k) : fb;
}

double Config::get_double(const std::string& s, const std::string& k) const {
    const std::string v = get(s, k);
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(line_of(s, k)) +
                          ": '" + v + "' is not a number");
    }
}

double Config::get_double_or(const std::string& s, const std::string& k,
                             double fb) const {
    return has(s, k) ? get_double(s, k) : fb;
}

int Config::get_int_or(const std::string& s, const std::string& k, int fb) const {
    if (!has(s, k)) return fb;
    const double d = get_double(s, k);
    return static_cast<int>(d);
}

bool Config::get_bool_or(const std::string& s, const std::string& k, bool fb) const {
    if (!has(s, k)) return fb;
    const std::string v = get(s, k);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(origin_ + ":" + std::to_string(line_of(s, k)) +
                      ": '" + v + "' is not a boolean");
}

std::vector<double> Config::get_list(const std::string& s, const std::string& k) const {
    const std::string v = get(s, k);
    std::vector<double> out;
    std::string item;
    std::istringstream iss(v);
    while (std::getline(iss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        try {
            out.push_back(std::stod(t));
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ":" + std::to_string(line_of(s, k)) +
                              ": '" + t + "' is not a number");
        }
    }
    return out;
}

int Config::line_of(const std::string& s, const std::string& k) const {
    auto it = data_.find(s);
    if (it == data_.end()) return 0;
    auto jt = it->second.find(k);
    return jt == it->second.end() ? 0 : jt->second.line;
}

void Config::set(const std::string& s, const std::string& k, const std::string& v) {
    data_[s][k] = {v, 0};
}

std::string Config::normalized() const {
    std::ostringstream os;
    for (const auto& [sec, entries] : data_) {
        os << '[' << sec << "]\n";
        for (const auto& [key, e] : entries) os << key << " = " << e.value << '\n';
        os << '\n';
    }
    return os.str();
}

std::string Config::hash() const {
    const std::string s = normalized();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
    // shortest decimal form that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) return buf;
    }
    return "0";
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    for (size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << csv_quote(table.columns[i]);
    out << '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_quote(row[i]);
        out << '\n';
    }
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << text;
}

} // namespace specgap
