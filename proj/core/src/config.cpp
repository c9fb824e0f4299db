#include "iqswitch/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "iqswitch/error.hpp"

namespace iqswitch {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ValidationError("config: " + field + ": " + what);
}

RealMatrix read_matrix(const json& v, std::size_t n, const std::string& field) {
    if (!v.is_array() || v.size() != n) fail(field, "expected " + std::to_string(n) + " rows");
    RealMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = v[i];
        if (!row.is_array() || row.size() != n)
            fail(field, "row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j) {
            if (!row[j].is_number()) fail(field, "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not a number");
            m(i, j) = row[j].get<double>();
        }
    }
    return m;
}

std::uint64_t read_count(const json& doc, const char* key, std::uint64_t fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

Pmf read_pmf(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) fail(field, "pmf must be a nonempty array");
    std::vector<double> p;
    for (const auto& x : v) {
        if (!x.is_number()) fail(field, "pmf entries must be numbers");
        p.push_back(x.get<double>());
    }
    try {
        return Pmf(std::move(p));
    } catch (const ValidationError& e) {
        fail(field, e.what());
    }
}

ArrivalFamily read_family(const json& d, std::size_t n, std::uint64_t& a_max_default) {
    static const std::set<std::string> keys{"kind", "scale", "trials", "pmf", "pmfs"};
    if (!d.is_object()) fail("dist", "must be an object");
    for (const auto& [k, _] : d.items())
        if (!keys.count(k)) fail("dist." + k, "unknown key");
    const std::string kind = d.value("kind", std::string("bernoulli"));
    ArrivalFamily f;
    if (kind == "bernoulli") {
        f.kind = ArrivalKind::bernoulli;
        a_max_default = 1;
    } else if (kind == "scaled_bernoulli" || kind == "binomial") {
        const char* key = kind == "binomial" ? "trials" : "scale";
        if (!d.contains(key) || !d.at(key).is_number_integer() || d.at(key).get<long long>() < 1)
            fail(std::string("dist.") + key, "required positive integer");
        f.kind = kind == "binomial" ? ArrivalKind::binomial : ArrivalKind::scaled_bernoulli;
        f.parameter = d.at(key).get<unsigned>();
        a_max_default = f.parameter;
    } else if (kind == "pmf") {
        f.kind = ArrivalKind::pmf;
        if (d.contains("pmf")) {
            f.pmfs.push_back(read_pmf(d.at("pmf"), "dist.pmf"));
        } else if (d.contains("pmfs")) {
            const json& rows = d.at("pmfs");
            if (!rows.is_array() || rows.size() != n) fail("dist.pmfs", "expected n rows of pmfs");
            for (std::size_t i = 0; i < n; ++i) {
                if (!rows[i].is_array() || rows[i].size() != n) fail("dist.pmfs", "expected n pmfs per row");
                for (std::size_t j = 0; j < n; ++j) f.pmfs.push_back(read_pmf(rows[i][j], "dist.pmfs"));
            }
        } else {
            fail("dist", "kind pmf needs 'pmf' or 'pmfs'");
        }
        a_max_default = 1;
        for (const auto& p : f.pmfs) a_max_default = std::max(a_max_default, p.max_value());
    } else {
        fail("dist.kind", "unknown kind '" + kind + "'");
    }
    return f;
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config: top level must be an object");
    static const std::set<std::string> keys{"n",    "nu",    "k",    "normalize_k", "eps",        "dist",
                                            "a_max", "seed", "horizon", "batch_count", "schema_version"};
    for (const auto& [k, _] : doc.items())
        if (!keys.count(k)) fail(k, "unknown key");

    if (!doc.contains("n") || !doc.at("n").is_number_integer() || doc.at("n").get<long long>() < 2)
        fail("n", "required integer >= 2");
    const auto n = doc.at("n").get<std::size_t>();

    if (!doc.contains("nu")) fail("nu", "required");
    RealMatrix nu(n);
    if (doc.at("nu").is_string()) {
        if (doc.at("nu").get<std::string>() != "uniform") fail("nu", "only the shorthand \"uniform\" is supported");
        nu = RealMatrix(n, 1.0 / static_cast<double>(n));
    } else {
        nu = read_matrix(doc.at("nu"), n, "nu");
    }

    RealMatrix k(n, 1.0);
    if (doc.contains("k")) {
        const json& kv = doc.at("k");
        if (kv.is_string()) {
            const auto s = kv.get<std::string>();
            if (s == "nu") k = nu;
            else if (s != "uniform") fail("k", "shorthand must be \"uniform\" or \"nu\"");
        } else {
            k = read_matrix(kv, n, "k");
        }
    }

    bool normalize = true;
    if (doc.contains("normalize_k")) {
        if (!doc.at("normalize_k").is_boolean()) fail("normalize_k", "must be a boolean");
        normalize = doc.at("normalize_k").get<bool>();
    }

    double eps = 0.1;
    if (doc.contains("eps")) {
        if (!doc.at("eps").is_number()) fail("eps", "must be a number");
        eps = doc.at("eps").get<double>();
    }

    std::uint64_t a_max_default = 1;
    const ArrivalFamily family = read_family(doc.value("dist", json::object()), n, a_max_default);

    RunConfig cfg{TrafficSpec::create(nu, k, eps, family, read_count(doc, "a_max", a_max_default),
                                      normalize ? KNormalization::normalize : KNormalization::as_given),
                  {}, {}};
    cfg.seed = read_count(doc, "seed", 1);
    cfg.horizon = read_count(doc, "horizon", 0);
    cfg.batch_count = read_count(doc, "batch_count", 20);
    CanonicalTraffic canon = canonicalize(cfg.spec);
    cfg.spec = std::move(canon.spec);
    cfg.row_order = std::move(canon.row_order);
    cfg.col_order = std::move(canon.col_order);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace iqswitch
