#pragma once

// Deterministic tabular output for the CLI: CSV is canonical, JSON mirrors it.
// No timestamps anywhere; metadata carries the tool version and a config hash
// so identical configs and builds produce byte-identical files.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace cli {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// FNV-1a, fixed across platforms and builds.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;

    void meta(const std::string& key, const std::string& value) {
        metadata.emplace_back(key, value);
    }
    void meta(const std::string& key, double value) { metadata.emplace_back(key, fmt17(value)); }
};

inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline void write_csv(const std::filesystem::path& path, const Table& t) {
    std::string s;
    for (const auto& [k, v] : t.metadata) s += "# " + k + "=" + v + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) s += ",";
        s += t.columns[i];
    }
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) s += ",";
            if (row[i]) s += fmt17(*row[i]);
        }
        s += "\n";
    }
    write_atomically(path, s);
}

inline void write_json(const std::filesystem::path& path, const Table& t) {
    nlohmann::json j;
    for (const auto& [k, v] : t.metadata) j["metadata"][k] = v;
    j["columns"] = t.columns;
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& cell : row) {
            if (cell)
                jr.push_back(*cell);
            else
                jr.push_back(nullptr);
        }
        rows.push_back(std::move(jr));
    }
    write_atomically(path, j.dump(2) + "\n");
}

struct ParsedCsv {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::runtime_error("missing column " + name);
    }
};

/// Strict reader for the files this tool writes; malformed content throws.
inline ParsedCsv read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing input " + path.string());
    ParsedCsv out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos)
                out.metadata[line.substr(2, eq - 2)] = line.substr(eq + 1);
            continue;
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!header_seen) {
            out.columns = cells;
            header_seen = true;
            continue;
        }
        if (cells.size() != out.columns.size())
            throw std::runtime_error("corrupted row in " + path.string());
        std::vector<std::optional<double>> row;
        for (const auto& c : cells) {
            if (c.empty()) {
                row.push_back(std::nullopt);
                continue;
            }
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (...) {
                throw std::runtime_error("corrupted cell in " + path.string());
            }
            if (used != c.size()) throw std::runtime_error("corrupted cell in " + path.string());
            row.push_back(v);
        }
        out.rows.push_back(std::move(row));
    }
    if (!header_seen) throw std::runtime_error("corrupted file " + path.string());
    return out;
}

}  // namespace cli
