#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlfront {

inline constexpr const char* kVersion = "0.1.0";

/// Fixed-precision text for a double; identical input gives identical bytes.
std::string format_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    class Row {
    public:
        Row& operator<<(const std::string& s);
        Row& operator<<(const char* s) { return *this << std::string(s); }
        Row& operator<<(double v) { return *this << format_number(v); }
        Row& operator<<(long v) { return *this << std::to_string(v); }
        Row& operator<<(int v) { return *this << std::to_string(v); }
        Row& operator<<(std::size_t v) { return *this << std::to_string(v); }
        Row& operator<<(bool v) { return *this << std::string(v ? "true" : "false"); }

    private:
        friend class CsvTable;
        explicit Row(std::vector<std::string>& cells) : cells_(cells) {}
        std::vector<std::string>& cells_;
    };

    Row row();
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }

    /// "# nlfront <version> config_hash=<hash> seed=<seed>" followed by the header and rows.
    void write(std::ostream& out, const std::string& config_hash, std::uint64_t seed) const;
    void save(const std::string& path, const std::string& config_hash, std::uint64_t seed) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Columns by header name; '#' lines are skipped.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  ///< throws ConfigError if missing
    std::vector<double> numbers(const std::string& name) const;
};

CsvData read_csv(const std::string& path);

}  // namespace nlfront
