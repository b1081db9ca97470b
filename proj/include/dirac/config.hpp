#ifndef DIRAC_CONFIG_HPP
#define DIRAC_CONFIG_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "dirac/boundary.hpp"
#include "dirac/integrator.hpp"
#include "dirac/potential.hpp"
#include "dirac/spectrum.hpp"

namespace dirac {

/// Parsed problem description from the CLI's JSON config.
struct ProblemConfig {
    BoundaryMatrix boundary;
    PotentialSpec potential;
    LambdaBox box{-5.0, 5.0, -5.0, 5.0};
    IntegratorConfig tolerances;
    int grid_n = 10;
};

namespace cfgdetail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw SchemaError("config error at " + path + ": " + what);
}

inline double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline Complex complex_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "complex numbers are two-element arrays [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Term term_at(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a term object");
    Term t;
    if (!j.contains("interval")) fail(path + ".interval", "missing");
    const json& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2) fail(path + ".interval", "expected [lo, hi]");
    t.lo = number_at(iv[0], path + ".interval[0]");
    t.hi = number_at(iv[1], path + ".interval[1]");
    // snap endpoints that are meant to be 0 or pi
    if (std::abs(t.lo) < 1e-12) t.lo = 0.0;
    if (std::abs(t.hi - kPi) < 1e-12) t.hi = kPi;
    if (t.lo < 0.0 || t.hi > kPi || !(t.lo < t.hi))
        fail(path + ".interval", "need 0 <= lo < hi <= pi");

    if (!j.contains("poly")) fail(path + ".poly", "missing");
    const json& poly = j.at("poly");
    if (!poly.is_array() || poly.empty())
        fail(path + ".poly", "expected a nonempty array of [re, im] coefficients");
    for (std::size_t i = 0; i < poly.size(); ++i)
        t.poly.push_back(complex_at(poly[i], path + ".poly[" + std::to_string(i) + "]"));

    if (j.contains("trig") && !j.at("trig").is_null()) {
        const json& trig = j.at("trig");
        if (!trig.is_object() || !trig.contains("kind") || !trig.contains("k"))
            fail(path + ".trig", "expected {\"kind\": \"cos\"|\"sin\", \"k\": int}");
        const std::string kind = trig.at("kind").get<std::string>();
        if (kind != "cos" && kind != "sin") fail(path + ".trig.kind", "must be \"cos\" or \"sin\"");
        if (!trig.at("k").is_number_integer() || trig.at("k").get<int>() < 0)
            fail(path + ".trig.k", "must be a nonnegative integer");
        t.trig = TrigFactor{kind == "cos" ? TrigFactor::Kind::Cos : TrigFactor::Kind::Sin,
                            trig.at("k").get<int>()};
    }
    return t;
}

inline std::vector<Term> terms_at(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of terms");
    std::vector<Term> terms;
    for (std::size_t i = 0; i < j.size(); ++i)
        terms.push_back(term_at(j[i], path + "[" + std::to_string(i) + "]"));
    return terms;
}

} // namespace cfgdetail

inline ProblemConfig parse_problem_config(const nlohmann::json& j) {
    using cfgdetail::fail;
    if (!j.is_object()) cfgdetail::fail("$", "top level must be an object");
    ProblemConfig cfg;

    if (!j.contains("boundary")) fail("boundary", "missing 2x4 complex matrix");
    const auto& b = j.at("boundary");
    if (!b.is_array() || b.size() != 2) fail("boundary", "expected two rows");
    for (int i = 0; i < 2; ++i) {
        const auto& row = b[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != 4)
            fail("boundary[" + std::to_string(i) + "]", "expected four complex entries");
        for (int k = 0; k < 4; ++k)
            cfg.boundary(i + 1, k + 1) = cfgdetail::complex_at(
                row[static_cast<std::size_t>(k)],
                "boundary[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }

    if (j.contains("potential")) {
        const auto& pot = j.at("potential");
        if (!pot.is_object()) fail("potential", "expected {\"p\": [...], \"q\": [...]}");
        if (pot.contains("p")) cfg.potential.p_terms = cfgdetail::terms_at(pot.at("p"), "potential.p");
        if (pot.contains("q")) cfg.potential.q_terms = cfgdetail::terms_at(pot.at("q"), "potential.q");
    }

    if (j.contains("box")) {
        const auto& box = j.at("box");
        if (!box.is_object()) fail("box", "expected {re_lo, re_hi, im_lo, im_hi}");
        for (const char* key : {"re_lo", "re_hi", "im_lo", "im_hi"})
            if (!box.contains(key) || !box.at(key).is_number()) fail(std::string("box.") + key, "missing number");
        cfg.box = {box.at("re_lo").get<double>(), box.at("re_hi").get<double>(),
                   box.at("im_lo").get<double>(), box.at("im_hi").get<double>()};
        if (!(cfg.box.re_lo < cfg.box.re_hi) || !(cfg.box.im_lo < cfg.box.im_hi))
            fail("box", "need re_lo < re_hi and im_lo < im_hi");
    }

    if (j.contains("tolerances")) {
        const auto& tol = j.at("tolerances");
        if (!tol.is_object()) fail("tolerances", "expected an object");
        if (tol.contains("rel_tol")) cfg.tolerances.rel_tol = cfgdetail::number_at(tol.at("rel_tol"), "tolerances.rel_tol");
        if (tol.contains("abs_tol")) cfg.tolerances.abs_tol = cfgdetail::number_at(tol.at("abs_tol"), "tolerances.abs_tol");
        if (tol.contains("max_step")) cfg.tolerances.max_step = cfgdetail::number_at(tol.at("max_step"), "tolerances.max_step");
        if (tol.contains("wronskian_tol")) cfg.tolerances.wronskian_tol = cfgdetail::number_at(tol.at("wronskian_tol"), "tolerances.wronskian_tol");
        if (tol.contains("method")) {
            const std::string m = tol.at("method").get<std::string>();
            if (m == "rk45") cfg.tolerances.method = IntegratorConfig::Method::RK45;
            else if (m == "taylor") cfg.tolerances.method = IntegratorConfig::Method::Taylor;
            else fail("tolerances.method", "must be \"rk45\" or \"taylor\"");
        }
        for (const char* key : {"rel_tol", "abs_tol", "max_step", "wronskian_tol"}) {
            if (tol.contains(key) && tol.at(key).get<double>() <= 0.0)
                fail(std::string("tolerances.") + key, "must be strictly positive");
        }
    }

    if (j.contains("grid_n")) {
        if (!j.at("grid_n").is_number_integer() || j.at("grid_n").get<int>() < 1)
            fail("grid_n", "must be a positive integer");
        cfg.grid_n = j.at("grid_n").get<int>();
    }
    return cfg;
}

inline ProblemConfig load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_problem_config(j);
}

} // namespace dirac

#endif
