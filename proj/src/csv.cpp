#include "nlfront/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlfront/errors.hpp"

namespace nlfront {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        cells_.push_back(s);
    } else {
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        cells_.push_back(q + "\"");
    }
    return *this;
}

CsvTable::Row CsvTable::row() {
    rows_.emplace_back();
    return Row(rows_.back());
}

void CsvTable::write(std::ostream& out, const std::string& config_hash, std::uint64_t seed) const {
    out << "# nlfront " << kVersion << " config_hash=" << config_hash << " seed=" << seed << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << "\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
}

void CsvTable::save(const std::string& path, const std::string& config_hash, std::uint64_t seed) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    write(out, config_hash, seed);
    if (!out) throw ConfigError("write failed: " + path);
}

std::size_t CsvData::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ConfigError("CSV has no column '" + name + "'");
}

std::vector<double> CsvData::numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (c >= r.size()) throw ConfigError("short CSV row");
        const std::string& s = r[c];
        if (s == "nan") {
            out.push_back(std::nan(""));
            continue;
        }
        try {
            out.push_back(std::stod(s));
        } catch (const std::exception&) {
            throw ConfigError("column '" + name + "': not a number: '" + s + "'");
        }
    }
    return out;
}

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    CsvData d;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            d.header = std::move(cells);
            have_header = true;
        } else {
            d.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw ConfigError("empty CSV: " + path);
    return d;
}

}  // namespace nlfront
