#pragma once

// CSV / JSON serialization of curves, frames and coefficients. Numbers are
// written with 17 significant digits; files are replaced atomically.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frame4/curve.hpp"
#include "frame4/error.hpp"
#include "frame4/frame.hpp"
#include "frame4/pattern.hpp"

namespace frame4::io {

enum class Format { Csv, Json };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw Error(ErrorKind::InvalidArgument, "unknown format '" + s + "'");
}

inline const char* extension(Format f) { return f == Format::Csv ? ".csv" : ".json"; }

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes to a sibling temporary file, then renames over the target.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::IoError, "cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw Error(ErrorKind::IoError, "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot move output into place at '" + path.string() + "'");
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

using Metadata = std::map<std::string, std::string>;

// --- generic tables ---------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
    out += '\n';
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k) out += ',';
            out += fmt(r[k]);
        }
        out += '\n';
    }
    return out;
}

inline std::string to_json(const Table& t, const Metadata& meta) {
    nlohmann::ordered_json j;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) j["metadata"][k] = v;
    j["columns"] = t.columns;
    auto samples = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json o;
        for (std::size_t k = 0; k < r.size(); ++k) o[t.columns[k]] = r[k];
        samples.push_back(std::move(o));
    }
    j["samples"] = std::move(samples);
    return j.dump(1) + "\n";
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) {
        const auto a = cur.find_first_not_of(" \t\r");
        const auto b = cur.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
    }
    return out;
}

inline Table parse_csv(const std::string& text, const std::string& origin) {
    Table t;
    std::istringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (t.columns.empty()) {
            t.columns = cells;
            continue;
        }
        if (cells.size() != t.columns.size())
            throw Error(ErrorKind::IoError, origin + ":" + std::to_string(lineno) + ": expected " +
                                                std::to_string(t.columns.size()) + " fields");
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size() || c.empty())
                throw Error(ErrorKind::IoError, origin + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw Error(ErrorKind::IoError, origin + ": empty file");
    return t;
}

inline Table parse_json(const std::string& text, const std::string& origin, Metadata* meta = nullptr) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        Table t;
        t.columns = j.at("columns").get<std::vector<std::string>>();
        for (const auto& o : j.at("samples")) {
            std::vector<double> row;
            for (const auto& c : t.columns) row.push_back(o.at(c).get<double>());
            t.rows.push_back(std::move(row));
        }
        if (meta && j.contains("metadata"))
            for (const auto& [k, v] : j["metadata"].items()) (*meta)[k] = v.is_string() ? v.get<std::string>() : v.dump();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::IoError, origin + ": " + e.what());
    }
}

inline Table read_table(const std::filesystem::path& path, Metadata* meta = nullptr) {
    const std::string text = read_file(path);
    if (path.extension() == ".json") return parse_json(text, path.string(), meta);
    return parse_csv(text, path.string());
}

inline void write_table(const std::filesystem::path& path, const Table& t, Format f, const Metadata& meta = {}) {
    atomic_write(path, f == Format::Csv ? to_csv(t) : to_json(t, meta));
}

inline void require_columns(const Table& t, const std::vector<std::string>& cols, const std::string& what) {
    if (t.columns != cols) {
        std::string want;
        for (std::size_t k = 0; k < cols.size(); ++k) want += (k ? "," : "") + cols[k];
        throw Error(ErrorKind::IoError, what + " needs columns " + want);
    }
}

// --- typed tables -------------------------------------------------------------

inline std::vector<std::string> frame_columns() {
    std::vector<std::string> c{"s"};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c.push_back("z" + std::to_string(i) + std::to_string(j));
    return c;
}

inline Table frame_table(const FramePath& f) {
    Table t{frame_columns(), {}};
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::vector<double> r{f.s[i]};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) r.push_back(f.Z[i](a, b));
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline FramePath frame_from_table(const Table& t) {
    require_columns(t, frame_columns(), "frame file");
    FramePath f;
    for (const auto& r : t.rows) {
        f.s.push_back(r[0]);
        Mat4 z;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) z(a, b) = r[static_cast<std::size_t>(1 + 4 * a + b)];
        f.Z.push_back(z);
    }
    return f;
}

inline const std::vector<std::string>& coefficient_columns() {
    static const std::vector<std::string> c{"s", "x1", "x2", "x3", "pattern_id"};
    return c;
}

inline Table coefficient_table(const CoefficientPath& c) {
    if (!c.pattern) throw Error(ErrorKind::InvalidArgument, "coefficient export needs a declared pattern");
    Table t{coefficient_columns(), {}};
    for (std::size_t i = 0; i < c.size(); ++i)
        t.rows.push_back({c.s[i], c.channels[i][0], c.channels[i][1], c.channels[i][2], static_cast<double>(*c.pattern)});
    return t;
}

inline CoefficientPath coefficients_from_table(const Table& t) {
    require_columns(t, coefficient_columns(), "coefficient file");
    if (t.rows.empty()) throw Error(ErrorKind::IoError, "coefficient file has no samples");
    const double id = t.rows.front()[4];
    if (id != std::floor(id) || id < 0 || id >= PatternCatalog::kCount)
        throw Error(ErrorKind::IoError, "pattern_id must be an integer in 0..15");
    std::vector<double> s;
    std::vector<std::array<double, 3>> ch;
    for (const auto& r : t.rows) {
        if (r[4] != id) throw Error(ErrorKind::IoError, "pattern_id must be the same on every row");
        s.push_back(r[0]);
        ch.push_back({r[1], r[2], r[3]});
    }
    return coefficients_from_channels(std::move(s), ch, static_cast<int>(id));
}

inline const std::vector<std::string>& curve_columns() {
    static const std::vector<std::string> c{"s", "x", "y", "z", "w", "tx", "ty", "tz", "tw"};
    return c;
}

inline Table curve_table(const CurvePath& c) {
    Table t{curve_columns(), {}};
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& g = c.gamma[i];
        const auto& v = c.T[i];
        t.rows.push_back({c.s[i], g[0], g[1], g[2], g[3], v[0], v[1], v[2], v[3]});
    }
    return t;
}

/// Raw sampled curve `t,x,y,z,w`.
inline RawCurve read_sampled_curve(const std::filesystem::path& path, Interval* domain) {
    const Table t = read_table(path);
    static const std::vector<std::string> cols{"t", "x", "y", "z", "w"};
    require_columns(t, cols, "sampled curve");
    std::vector<double> ts;
    std::vector<Vec4> ps;
    for (const auto& r : t.rows) {
        ts.push_back(r[0]);
        ps.emplace_back(r[1], r[2], r[3], r[4]);
    }
    if (ts.size() < 16) throw Error(ErrorKind::InvalidArgument, "sampled curve needs at least 16 rows");
    if (domain) *domain = {ts.front(), ts.back()};
    return raw_curve_from_samples(std::move(ts), std::move(ps));
}

}  // namespace frame4::io
