#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "polyprob/errors.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/hgm.hpp"

namespace polyprob {

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// {"d": ..., "n": ..., "a": [d rows of n], "b": [n]}
inline nlohmann::json system_to_json(const HalfspaceSystem& sys)
{
    nlohmann::json j;
    j["d"] = sys.d;
    j["n"] = sys.n;
    auto rows = nlohmann::json::array();
    for (int i = 0; i < sys.d; ++i) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < sys.n; ++c) row.push_back(sys.a(i, c));
        rows.push_back(std::move(row));
    }
    j["a"] = std::move(rows);
    auto b = nlohmann::json::array();
    for (int c = 0; c < sys.n; ++c) b.push_back(sys.b(c));
    j["b"] = std::move(b);
    return j;
}

inline HalfspaceSystem system_from_json(const nlohmann::json& j)
{
    try {
        const int d = j.at("d").get<int>();
        const int n = j.at("n").get<int>();
        if (d < 1 || n < 1) fail(ErrorCode::ParseError, "d and n must be positive");
        const auto& rows = j.at("a");
        const auto& bj = j.at("b");
        if (static_cast<int>(rows.size()) != d) fail(ErrorCode::ParseError, "a must have d rows");
        if (static_cast<int>(bj.size()) != n) fail(ErrorCode::ParseError, "b must have n entries");
        Eigen::MatrixXd a(d, n);
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(rows[i].size()) != n) fail(ErrorCode::ParseError, "a rows must have n entries");
            for (int c = 0; c < n; ++c) a(i, c) = rows[i][c].get<double>();
        }
        Eigen::VectorXd b(n);
        for (int c = 0; c < n; ++c) b(c) = bj[c].get<double>();
        return build_system(a, b);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("bad system JSON: ") + e.what());
    }
}

/// One CSV line per half-space: a_1j, ..., a_dj, b_j (17 significant digits,
/// so values survive the round trip bit for bit).
inline std::string system_to_csv(const HalfspaceSystem& sys)
{
    std::string out;
    for (int j = 0; j < sys.n; ++j) {
        for (int i = 0; i < sys.d; ++i) {
            out += format_double(sys.a(i, j));
            out += ',';
        }
        out += format_double(sys.b(j));
        out += '\n';
    }
    return out;
}

inline HalfspaceSystem system_from_csv(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail(ErrorCode::ParseError, "bad CSV number: '" + cell + "'");
            }
        }
        if (row.size() < 2) fail(ErrorCode::ParseError, "CSV rows need at least two columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorCode::ParseError, "empty CSV input");
    const std::size_t width = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != width) fail(ErrorCode::ParseError, "CSV rows have inconsistent widths");
    const int d = static_cast<int>(width) - 1;
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd a(d, n);
    Eigen::VectorXd b(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < d; ++i) a(i, j) = rows[j][i];
        b(j) = rows[j][d];
    }
    return build_system(a, b);
}

/// Parse a system file; dispatches on extension, else sniffs for JSON.
inline HalfspaceSystem load_system_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const bool json_ext = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    const bool csv_ext = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
    const bool looks_json = text.find_first_not_of(" \t\r\n") != std::string::npos &&
                            text[text.find_first_not_of(" \t\r\n")] == '{';
    if (json_ext || (!csv_ext && looks_json)) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) fail(ErrorCode::ParseError, "invalid JSON in '" + path + "'");
        return system_from_json(j);
    }
    return system_from_csv(text);
}

inline nlohmann::json result_to_json(const HgmResult& res)
{
    nlohmann::json j;
    j["probability"] = res.probability;
    auto g = nlohmann::json::array();
    for (int i = 0; i < res.g_final.values.size(); ++i) g.push_back(res.g_final.values(i));
    j["g_final"] = std::move(g);
    j["steps"] = res.steps;
    j["rejections"] = res.rejections;
    j["min_gram_condition_margin"] = res.min_gram_condition_margin;
    j["wall_time_s"] = res.wall_time_s;
    j["flags"] = res.flags;
    return j;
}

} // namespace polyprob
