#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "evgrow/errors.hpp"
#include "evgrow/family.hpp"
#include "evgrow/meanset.hpp"
#include "evgrow/nml.hpp"

namespace evgrow {

// Minimal TOML-style reader: [tables], [[sweep]] array tables, and
// key = value lines with strings, numbers, booleans and (nested) arrays.
namespace toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<std::string, double, bool, Array> v;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_number() const { return std::holds_alternative<double>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }
    const std::string& str() const { return std::get<std::string>(v); }
    double num() const { return std::get<double>(v); }
    const Array& arr() const { return std::get<Array>(v); }
};

using Table = std::map<std::string, Value>;

struct Document {
    Table root;
    std::map<std::string, Table> tables;
    std::vector<Table> sweeps;
};

namespace detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline Value parse_value(const std::string& s, std::size_t& i, int line);

inline Value parse_array(const std::string& s, std::size_t& i, int line) {
    Array items;
    ++i;  // consume '['
    for (;;) {
        skip_ws(s, i);
        if (i >= s.size()) throw ConfigError("line " + std::to_string(line) +
                                             ": unterminated array");
        if (s[i] == ']') {
            ++i;
            return Value{std::move(items)};
        }
        items.push_back(parse_value(s, i, line));
        skip_ws(s, i);
        if (i < s.size() && s[i] == ',') ++i;
    }
}

inline Value parse_value(const std::string& s, std::size_t& i, int line) {
    skip_ws(s, i);
    if (i >= s.size()) throw ConfigError("line " + std::to_string(line) + ": missing value");
    if (s[i] == '[') return parse_array(s, i, line);
    if (s[i] == '"') {
        const std::size_t end = s.find('"', i + 1);
        if (end == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": unterminated string");
        Value out{s.substr(i + 1, end - i - 1)};
        i = end + 1;
        return out;
    }
    std::size_t end = i;
    while (end < s.size() && s[end] != ',' && s[end] != ']' && s[end] != '#' &&
           s[end] != ' ' && s[end] != '\t')
        ++end;
    const std::string tok = s.substr(i, end - i);
    i = end;
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    if (tok == "inf") return Value{kInf};
    if (tok == "-inf") return Value{-kInf};
    try {
        std::size_t used = 0;
        const double d = std::stod(tok, &used);
        if (used == tok.size()) return Value{d};
    } catch (...) {
    }
    throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + tok +
                      "'");
}

}  // namespace detail

inline Document parse(std::istream& in) {
    Document doc;
    Table* current = &doc.root;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t i = 0;
        detail::skip_ws(line, i);
        if (i >= line.size() || line[i] == '#') continue;
        if (line[i] == '[') {
            const bool array_table = i + 1 < line.size() && line[i + 1] == '[';
            const std::size_t open = i + (array_table ? 2 : 1);
            const std::size_t close = line.find(array_table ? "]]" : "]", open);
            if (close == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": malformed table header");
            const std::string name = line.substr(open, close - open);
            if (array_table) {
                if (name != "sweep")
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": only [[sweep]] array tables are supported");
                doc.sweeps.emplace_back();
                current = &doc.sweeps.back();
            } else {
                current = &doc.tables[name];
            }
            continue;
        }
        const std::size_t eq = line.find('=', i);
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(i, eq - i);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        std::size_t vi = eq + 1;
        const Value val = detail::parse_value(line, vi, lineno);
        detail::skip_ws(line, vi);
        if (vi < line.size() && line[vi] != '#')
            throw ConfigError("line " + std::to_string(lineno) +
                              ": trailing characters after value");
        (*current)[key] = val;
    }
    return doc;
}

}  // namespace toml

// A fully resolved experiment: one mode applied to one family / mean set /
// partition / sample block. Sweep entries expand into several of these.
struct ExperimentConfig {
    std::string mode;

    std::string family_name = "gaussian";
    int d = 1;
    double p = 0.3;
    double lambda0 = 2.0;

    std::string meanset_variant;
    Vec v;  // halfspace normal
    double a = 0.0;
    double lo = -kInf, hi = kInf;
    double mu_minus = 0.0, mu_plus = 0.0;
    double D1 = 0.0;
    std::vector<std::pair<Vec, double>> faces;

    std::string partition_kind = "radial";
    std::string estimator = "mle";
    int corners = 0;
    std::vector<int> k_list;

    int n = 1;
    std::vector<int> n_list;
    std::uint64_t seed = 0;
    std::int64_t mc_samples = 1'000'000;

    std::string csv_path;
    std::string svg_path;

    FamilySpec make_family() const {
        if (family_name == "gaussian") return gaussian_location(d);
        if (family_name == "scaled_bernoulli") return scaled_bernoulli(p);
        if (family_name == "poisson") return poisson(lambda0);
        throw ConfigError("unknown family '" + family_name + "'");
    }

    MeanSet make_meanset() const {
        if (meanset_variant == "halfspace") return MeanSet::half_space(v, a);
        if (meanset_variant == "interval") return MeanSet::interval(lo, hi);
        if (meanset_variant == "polytope") return MeanSet::polytope(faces);
        if (meanset_variant == "surround-interval")
            return MeanSet::surround_interval(mu_minus, mu_plus);
        if (meanset_variant == "kl-ball") return MeanSet::surround_kl_ball(D1);
        throw ConfigError("unknown or missing meanset variant '" + meanset_variant + "'");
    }

    PartitionSpec make_partition(const FamilySpec& fam, const MeanSet& set) const {
        const EstimatorKind est = estimator == "radial"
                                      ? EstimatorKind::self_consistent_radial
                                      : EstimatorKind::boundary_mle;
        if (estimator != "mle" && estimator != "radial")
            throw ConfigError("estimator must be 'mle' or 'radial'");
        if (partition_kind == "radial") return PartitionSpec::radial(est);
        if (partition_kind == "cones") {
            if (corners < 1) throw ConfigError("cones partition requires corners >= 1");
            std::vector<Vec> pts;
            if (fam.d == 1) {
                const auto [mlo, mhi] = surround_endpoints_1d(fam, set);
                pts.push_back(vec1(mlo));
                if (corners > 1) pts.push_back(vec1(mhi));
            } else {
                for (int j = 0; j < corners; ++j) {
                    const double phi = 2.0 * M_PI * j / corners;
                    const Vec u = vec2(std::cos(phi), std::sin(phi));
                    pts.push_back(boundary_radius(fam, set, u) * u);
                }
            }
            return PartitionSpec::cones(pts, est);
        }
        throw ConfigError("partition must be 'radial' or 'cones'");
    }

    nlohmann::json echo() const {
        nlohmann::json j;
        j["mode"] = mode;
        j["family"] = {{"name", family_name}};
        if (family_name == "gaussian") j["family"]["d"] = d;
        if (family_name == "scaled_bernoulli") j["family"]["p"] = p;
        if (family_name == "poisson") j["family"]["lambda0"] = lambda0;
        if (!meanset_variant.empty()) {
            nlohmann::json m{{"variant", meanset_variant}};
            if (meanset_variant == "halfspace") {
                m["a"] = a;
                m["v"] = std::vector<double>(v.data(), v.data() + v.size());
            } else if (meanset_variant == "interval") {
                m["lo"] = lo;
                m["hi"] = hi;
            } else if (meanset_variant == "surround-interval") {
                m["mu_minus"] = mu_minus;
                m["mu_plus"] = mu_plus;
            } else if (meanset_variant == "kl-ball") {
                m["D1"] = D1;
            } else if (meanset_variant == "polytope") {
                nlohmann::json fs = nlohmann::json::array();
                for (const auto& [fv, fa] : faces) {
                    nlohmann::json row = std::vector<double>(fv.data(), fv.data() + fv.size());
                    row.push_back(fa);
                    fs.push_back(row);
                }
                m["faces"] = fs;
            }
            j["meanset"] = m;
        }
        j["partition"] = partition_kind;
        j["estimator"] = estimator;
        if (corners > 0) j["corners"] = corners;
        if (!k_list.empty()) j["k_list"] = k_list;
        j["sample"] = {{"n", n}, {"seed", seed}, {"mc_samples", mc_samples}};
        if (!n_list.empty()) j["sample"]["n_list"] = n_list;
        return j;
    }
};

namespace detail {

inline double require_num(const toml::Table& t, const std::string& key,
                          const std::string& where) {
    const auto it = t.find(key);
    if (it == t.end() || !it->second.is_number())
        throw ConfigError(where + ": missing numeric key '" + key + "'");
    return it->second.num();
}

inline std::optional<double> opt_num(const toml::Table& t, const std::string& key) {
    const auto it = t.find(key);
    if (it == t.end()) return std::nullopt;
    if (!it->second.is_number()) throw ConfigError("key '" + key + "' must be a number");
    return it->second.num();
}

inline std::optional<std::string> opt_str(const toml::Table& t, const std::string& key) {
    const auto it = t.find(key);
    if (it == t.end()) return std::nullopt;
    if (!it->second.is_string()) throw ConfigError("key '" + key + "' must be a string");
    return it->second.str();
}

inline std::vector<int> int_list(const toml::Value& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("key '" + key + "' must be an array");
    std::vector<int> out;
    for (const auto& item : v.arr()) {
        if (!item.is_number()) throw ConfigError("key '" + key + "' must hold numbers");
        out.push_back(int(item.num()));
    }
    return out;
}

inline void apply_sample_keys(ExperimentConfig& cfg, const toml::Table& t) {
    if (auto n = opt_num(t, "n")) cfg.n = int(*n);
    if (auto seed = opt_num(t, "seed")) cfg.seed = std::uint64_t(*seed);
    if (auto mc = opt_num(t, "mc_samples")) cfg.mc_samples = std::int64_t(*mc);
    if (auto it = t.find("n_list"); it != t.end())
        cfg.n_list = int_list(it->second, "n_list");
    if (auto c = opt_num(t, "corners")) cfg.corners = int(*c);
}

inline ExperimentConfig from_tables(const toml::Document& doc) {
    ExperimentConfig cfg;
    const auto mode = opt_str(doc.root, "mode");
    if (!mode) throw ConfigError("top level: missing key 'mode'");
    cfg.mode = *mode;

    const auto fam_it = doc.tables.find("family");
    const auto flat_family = opt_str(doc.root, "family");
    if (fam_it == doc.tables.end() && !flat_family && cfg.mode != "verify")
        throw ConfigError("missing [family] table (or flat 'family' key)");
    if (flat_family) {
        cfg.family_name = *flat_family;
        if (auto d = opt_num(doc.root, "d")) cfg.d = int(*d);
        if (auto p = opt_num(doc.root, "p")) cfg.p = *p;
        if (auto l = opt_num(doc.root, "lambda0")) cfg.lambda0 = *l;
    }
    if (fam_it != doc.tables.end()) {
        const toml::Table& f = fam_it->second;
        if (auto name = opt_str(f, "name")) cfg.family_name = *name;
        if (auto d = opt_num(f, "d")) cfg.d = int(*d);
        if (auto p = opt_num(f, "p")) cfg.p = *p;
        if (auto l = opt_num(f, "lambda0")) cfg.lambda0 = *l;
    }

    if (const auto ms_it = doc.tables.find("meanset"); ms_it != doc.tables.end()) {
        const toml::Table& m = ms_it->second;
        if (auto var = opt_str(m, "variant")) cfg.meanset_variant = *var;
        if (auto av = opt_num(m, "a")) cfg.a = *av;
        if (auto lov = opt_num(m, "lo")) cfg.lo = *lov;
        if (auto hiv = opt_num(m, "hi")) cfg.hi = *hiv;
        if (auto mm = opt_num(m, "mu_minus")) cfg.mu_minus = *mm;
        if (auto mp = opt_num(m, "mu_plus")) cfg.mu_plus = *mp;
        if (auto dd = opt_num(m, "D1")) cfg.D1 = *dd;
        if (auto it = m.find("v"); it != m.end()) {
            if (!it->second.is_array()) throw ConfigError("meanset.v must be an array");
            const auto& arr = it->second.arr();
            cfg.v = Vec(arr.size());
            for (std::size_t i = 0; i < arr.size(); ++i) cfg.v[i] = arr[i].num();
        }
        if (auto it = m.find("faces"); it != m.end()) {
            if (!it->second.is_array()) throw ConfigError("meanset.faces must be an array");
            for (const auto& row : it->second.arr()) {
                if (!row.is_array() || row.arr().size() < 2)
                    throw ConfigError("meanset.faces rows must be [v..., a]");
                const auto& r = row.arr();
                Vec fv(r.size() - 1);
                for (std::size_t i = 0; i + 1 < r.size(); ++i) fv[i] = r[i].num();
                cfg.faces.emplace_back(fv, r.back().num());
            }
        }
    }

    if (const auto pt_it = doc.tables.find("partition"); pt_it != doc.tables.end()) {
        const toml::Table& pt = pt_it->second;
        if (auto kind = opt_str(pt, "kind")) cfg.partition_kind = *kind;
        if (auto est = opt_str(pt, "estimator")) cfg.estimator = *est;
        if (auto c = opt_num(pt, "corners")) cfg.corners = int(*c);
        if (auto it = pt.find("k_list"); it != pt.end())
            cfg.k_list = int_list(it->second, "k_list");
    }
    // flat aliases matching the documented key names
    if (auto kind = opt_str(doc.root, "partition")) cfg.partition_kind = *kind;
    if (auto est = opt_str(doc.root, "estimator")) cfg.estimator = *est;
    if (auto c = opt_num(doc.root, "corners")) cfg.corners = int(*c);
    if (auto it = doc.root.find("k_list"); it != doc.root.end())
        cfg.k_list = int_list(it->second, "k_list");

    if (const auto s_it = doc.tables.find("sample"); s_it != doc.tables.end())
        apply_sample_keys(cfg, s_it->second);

    if (const auto o_it = doc.tables.find("output"); o_it != doc.tables.end()) {
        if (auto csv = opt_str(o_it->second, "csv")) cfg.csv_path = *csv;
        if (auto svg = opt_str(o_it->second, "svg")) cfg.svg_path = *svg;
    }
    return cfg;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
    static const std::vector<std::string> modes{
        "grow-convex",     "csc-convex",   "grow-surround-1d", "nml-bound",
        "regret-scan",     "grow-sandwich", "compare-partitions", "verify"};
    if (std::find(modes.begin(), modes.end(), cfg.mode) == modes.end())
        throw ConfigError("unknown mode '" + cfg.mode + "'");
    if (cfg.mode == "verify") return;
    if (cfg.n < 1) throw ConfigError("sample.n must be >= 1");
    if (cfg.mc_samples < 1) throw ConfigError("sample.mc_samples must be >= 1");
    for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
        if (cfg.n_list[i] <= cfg.n_list[i - 1])
            throw ConfigError("sample.n_list must be strictly increasing");
    const bool needs_meanset = cfg.mode != "grow-surround-1d";
    if (needs_meanset && cfg.meanset_variant.empty())
        throw ConfigError("mode '" + cfg.mode + "' requires a [meanset] table");
    if (cfg.mode == "grow-surround-1d" && cfg.meanset_variant.empty() &&
        !(cfg.mu_minus < 0.0 && cfg.mu_plus > 0.0))
        throw ConfigError("grow-surround-1d requires mu_minus < 0 < mu_plus");
    if (cfg.mode == "regret-scan" && cfg.n_list.size() < 5)
        throw ConfigError("regret-scan requires n_list with at least 5 entries");
    if (cfg.mode == "compare-partitions" && cfg.k_list.empty())
        throw ConfigError("compare-partitions requires k_list");
}

// Parses one experiment file and expands its [[sweep]] entries. Every
// returned config is fully validated; the optional env_seed (EVGROW_SEED)
// overrides the seed in all of them.
inline std::vector<ExperimentConfig> parse_configs(std::istream& in,
                                                   std::optional<std::uint64_t> env_seed) {
    const toml::Document doc = toml::parse(in);
    const ExperimentConfig base = detail::from_tables(doc);
    std::vector<ExperimentConfig> out;
    if (doc.sweeps.empty()) {
        out.push_back(base);
    } else {
        for (const toml::Table& sweep : doc.sweeps) {
            ExperimentConfig cfg = base;
            detail::apply_sample_keys(cfg, sweep);
            if (auto dd = detail::opt_num(sweep, "D1")) cfg.D1 = *dd;
            out.push_back(cfg);
        }
    }
    for (auto& cfg : out) {
        if (env_seed) cfg.seed = *env_seed;
        validate_config(cfg);
    }
    return out;
}

inline std::vector<ExperimentConfig> parse_config_file(
    const std::string& path, std::optional<std::uint64_t> env_seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_configs(in, env_seed);
}

}  // namespace evgrow
