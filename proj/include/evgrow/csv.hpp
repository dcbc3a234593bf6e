#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evgrow/csc_convex.hpp"

namespace evgrow {

inline constexpr const char* kCsvHeader =
    "family,d,mode,meanset,partition,estimator,n,D_lower,mmreg,log_bound,bound,"
    "oracle_prob,oracle_se,oracle_kind,extra_json";

// 17 significant digits: doubles round-trip exactly
inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';  // embedded quotes are doubled
        out += c;
    }
    out += "\"";
    return out;
}

struct CsvRow {
    std::string family;
    int d = 1;
    std::string mode;
    std::string meanset;
    std::string partition;
    std::string estimator;
    int n = 1;
    double D_lower = 0.0;
    double mmreg = 0.0;
    double log_bound = 0.0;
    double bound = 1.0;
    std::optional<double> oracle_prob;
    std::optional<double> oracle_se;
    std::string oracle_kind = "none";
    nlohmann::json extra;

    std::string to_line() const {
        std::string line;
        line += family + ",";
        line += std::to_string(d) + ",";
        line += mode + ",";
        line += csv_quote(meanset) + ",";
        line += partition + ",";
        line += estimator + ",";
        line += std::to_string(n) + ",";
        line += fmt17(D_lower) + ",";
        line += fmt17(mmreg) + ",";
        line += fmt17(log_bound) + ",";
        line += fmt17(bound) + ",";
        line += (oracle_prob ? fmt17(*oracle_prob) : std::string()) + ",";
        line += (oracle_se ? fmt17(*oracle_se) : std::string()) + ",";
        line += oracle_kind + ",";
        line += csv_quote(extra.dump());
        return line;
    }
};

inline CsvRow row_from_report(const BoundReport& rep, const std::string& mode, int d) {
    CsvRow row;
    row.family = rep.family;
    row.d = d;
    row.mode = mode;
    row.meanset = rep.meanset;
    row.partition = rep.partition;
    row.estimator = rep.estimator;
    row.n = rep.n;
    row.D_lower = rep.D_lower;
    row.mmreg = rep.regret;
    row.log_bound = rep.log_bound;
    row.bound = rep.bound;
    row.oracle_prob = rep.oracle_prob;
    row.oracle_se = rep.oracle_se;
    row.oracle_kind = to_string(rep.oracle_kind);
    return row;
}

inline std::string render_csv(const std::vector<CsvRow>& rows) {
    std::string out = kCsvHeader;
    out += "\n";
    for (const auto& row : rows) {
        out += row.to_line();
        out += "\n";
    }
    return out;
}

}  // namespace evgrow
