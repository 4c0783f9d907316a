#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mfglab/common.hpp"

namespace mfglab {

/// Shared tabular text format used by every module that writes results:
/// '#'-prefixed metadata lines (first one carries the format version),
/// a comma-separated header row with labeled columns, then numeric rows
/// printed with full round-trip precision. Byte-stable for fixed content.
class Table {
public:
    static constexpr const char* kFormatTag = "mfglab-table v1";

    void set_meta(const std::string& key, const std::string& value) {
        for (auto& kv : meta_) {
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        }
        meta_.emplace_back(key, value);
    }

    void set_columns(std::vector<std::string> names) { columns_ = std::move(names); }

    void add_row(const std::vector<double>& row) {
        if (row.size() != columns_.size())
            throw Error("Table::add_row: row width " + std::to_string(row.size()) +
                        " != column count " + std::to_string(columns_.size()));
        rows_.push_back(row);
    }

    const std::vector<std::pair<std::string, std::string>>& meta() const { return meta_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }

    std::string meta_value(const std::string& key) const {
        for (const auto& kv : meta_)
            if (kv.first == key) return kv.second;
        throw Error("Table: missing metadata key '" + key + "'");
    }

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) return static_cast<int>(i);
        throw Error("Table: missing column '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const int j = column_index(name);
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(r[static_cast<std::size_t>(j)]);
        return out;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << "# " << kFormatTag << "\n";
        for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << "\n";
        for (std::size_t j = 0; j < columns_.size(); ++j)
            os << columns_[j] << (j + 1 < columns_.size() ? "," : "");
        os << "\n";
        for (const auto& r : rows_) {
            for (std::size_t j = 0; j < r.size(); ++j)
                os << format_double(r[j]) << (j + 1 < r.size() ? "," : "");
            os << "\n";
        }
        return os.str();
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("Table: cannot open '" + path + "' for writing");
        f << to_string();
    }

    static Table parse(std::istream& in) {
        Table t;
        std::string line;
        bool saw_tag = false, saw_header = false;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') {
                std::string body = trim(line.substr(1));
                if (!saw_tag) {
                    if (body != kFormatTag)
                        throw Error("Table: unrecognized format tag '" + body + "'");
                    saw_tag = true;
                    continue;
                }
                auto pos = body.find(':');
                if (pos == std::string::npos)
                    throw Error("Table: malformed metadata line '" + line + "'");
                t.set_meta(trim(body.substr(0, pos)), trim(body.substr(pos + 1)));
                continue;
            }
            if (!saw_tag) throw Error("Table: missing format tag");
            if (!saw_header) {
                auto cols = split(line, ',');
                for (auto& c : cols) c = trim(c);
                t.set_columns(cols);
                saw_header = true;
                continue;
            }
            auto cells = split(line, ',');
            std::vector<double> row;
            row.reserve(cells.size());
            for (auto& c : cells) row.push_back(parse_double(trim(c)));
            t.add_row(row);
        }
        if (!saw_header) throw Error("Table: no header row");
        return t;
    }

    static Table read(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error("Table: cannot open '" + path + "'");
        return parse(f);
    }

private:
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace mfglab
