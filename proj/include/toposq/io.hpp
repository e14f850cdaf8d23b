#pragma once

// JSON ingestion and emission for matrices, intervals, contexts, posets,
// states, propositions, bundle opens and truth values.

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "toposq/states.hpp"

namespace toposq::io {

using json = nlohmann::json;

inline Error parse_error(const std::string& what) { return Error(ErrorCode::ParseError, what); }

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw parse_error(std::string("missing field '") + key + "'");
    return j.at(key);
}

// Numbers may be JSON numbers or strings "p/q", "p", "-inf", "inf".
inline double parse_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw parse_error("expected a number or rational string");
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    auto to_double = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw parse_error("bad number '" + s + "'");
        }
        if (used != t.size()) throw parse_error("bad number '" + s + "'");
        return v;
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) return to_double(s);
    const double den = to_double(s.substr(slash + 1));
    if (den == 0) throw parse_error("zero denominator in '" + s + "'");
    return to_double(s.substr(0, slash)) / den;
}

inline json number_to_json(double x) {
    if (std::isinf(x)) return x < 0 ? json("-inf") : json("inf");
    return x;
}

inline cplx parse_complex(const json& j) {
    if (j.is_number() || j.is_string()) return {parse_number(j), 0.0};
    if (!j.is_array() || j.size() != 2) throw parse_error("complex entry must be [re, im]");
    return {parse_number(j[0]), parse_number(j[1])};
}

inline Matrix parse_matrix(const json& j) {
    const long n = field(j, "dim").get<long>();
    const json& rows = field(j, "rows");
    if (n < 1 || !rows.is_array() || long(rows.size()) != n) throw parse_error("matrix needs dim rows");
    Matrix m(n, n);
    for (long i = 0; i < n; ++i) {
        if (!rows[std::size_t(i)].is_array() || long(rows[std::size_t(i)].size()) != n) {
            throw parse_error("matrix row " + std::to_string(i) + " has wrong length");
        }
        for (long k = 0; k < n; ++k) m(i, k) = parse_complex(rows[std::size_t(i)][std::size_t(k)]);
    }
    return m;
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (long k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(row);
    }
    return {{"dim", m.rows()}, {"rows", rows}};
}

inline Vector parse_vector(const json& j) {
    if (!j.is_array() || j.empty()) throw parse_error("vector must be a nonempty array");
    Vector v(long(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(long(i)) = parse_complex(j[i]);
    return v;
}

inline json vector_to_json(const Vector& v) {
    json out = json::array();
    for (long i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

inline RealInterval parse_interval(const json& j) {
    RealInterval iv{parse_number(field(j, "lo")), parse_number(field(j, "hi")), j.value("lo_open", true),
                    j.value("hi_open", true)};
    iv.validate();
    return iv;
}

inline json interval_to_json(const RealInterval& iv) {
    return {{"lo", number_to_json(iv.lo)},
            {"hi", number_to_json(iv.hi)},
            {"lo_open", iv.lo_open},
            {"hi_open", iv.hi_open}};
}

struct NamedContext {
    Context context;
    std::string name;
};

inline NamedContext parse_context(const json& j, Tolerance tol) {
    std::vector<HermitianOperator> gens;
    const char* key = j.contains("generators") ? "generators" : "projections";
    const json& list = field(j, key);
    if (!list.is_array()) throw parse_error(std::string(key) + " must be an array");
    for (const auto& m : list) gens.emplace_back(parse_matrix(m), tol);
    const std::size_t dim = gens.empty() ? j.value("dim", std::size_t{0}) : gens.front().dim();
    if (dim == 0) throw parse_error("context without generators needs 'dim'");
    return {context_from_operators(gens, dim, tol), j.value("name", std::string())};
}

inline json context_to_json(const Context& c, const std::string& name = {}) {
    json ps = json::array();
    for (const auto& p : c.minimal_projections()) ps.push_back(matrix_to_json(p.matrix()));
    json out{{"projections", ps}};
    if (!name.empty()) out["name"] = name;
    return out;
}

// include_trivial falls back to the given default when absent.
inline ContextPoset parse_poset(const json& j, bool include_trivial_default, Tolerance tol) {
    const json& seeds = field(j, "seeds");
    if (!seeds.is_array()) throw parse_error("seeds must be an array");
    std::vector<Context> ctxs;
    std::vector<std::string> names;
    for (const auto& s : seeds) {
        auto nc = parse_context(s, tol);
        ctxs.push_back(std::move(nc.context));
        names.push_back(std::move(nc.name));
    }
    const bool trivial = j.value("include_trivial", include_trivial_default);
    std::size_t dim = ctxs.empty() ? j.value("dim", std::size_t{0}) : ctxs.front().dim();
    if (dim == 0) throw parse_error("poset without seeds needs 'dim'");
    return build_poset(dim, ctxs, trivial, tol, names);
}

inline json poset_to_json(const ContextPoset& p) {
    json seeds = json::array();
    for (std::size_t i = 0; i < p.size(); ++i) seeds.push_back(context_to_json(p.context(i), p.name(i)));
    return {{"dim", p.dim()}, {"seeds", seeds}, {"include_trivial", p.include_trivial()}};
}

struct ParsedState {
    std::optional<Vector> vector;
    DensityState density;
};

inline ParsedState parse_state(const json& j, Tolerance tol) {
    if (j.contains("vector")) {
        const Vector v = parse_vector(j.at("vector"));
        return {v, DensityState::from_vector(v, tol)};
    }
    return {std::nullopt, DensityState(HermitianOperator(parse_matrix(field(j, "density")), tol), tol)};
}

inline json state_to_json(const ParsedState& s) {
    if (s.vector) return {{"vector", vector_to_json(*s.vector)}};
    return {{"density", matrix_to_json(s.density.rho().matrix())}};
}

enum class PropVariant { cov1, cov2, contra };

inline const char* to_string(PropVariant v) {
    switch (v) {
        case PropVariant::cov1: return "cov1";
        case PropVariant::cov2: return "cov2";
        case PropVariant::contra: return "contra";
    }
    return "?";
}

struct Proposition {
    HermitianOperator op;
    PropVariant variant;
    IntervalUnion windows;

    ScottBasic window() const {
        if (windows.size() != 1 || !windows[0].lo_open || !windows[0].hi_open) {
            throw Error(ErrorCode::DegenerateInterval, "covariant propositions need one open window");
        }
        return {windows[0].lo, windows[0].hi};
    }

    BundleOpen evaluate(const SpectralBundle& b) const {
        switch (variant) {
            case PropVariant::cov1: return elementary_prop_cov1(op, window(), b);
            case PropVariant::cov2: return elementary_prop_cov2(op, window(), b);
            case PropVariant::contra: return elementary_prop_contra(op, windows, b);
        }
        throw Error(ErrorCode::ModeMismatch, "unknown variant");
    }
};

inline Proposition parse_proposition(const json& j, Tolerance tol) {
    const std::string v = field(j, "variant").get<std::string>();
    PropVariant pv;
    if (v == "cov1") pv = PropVariant::cov1;
    else if (v == "cov2") pv = PropVariant::cov2;
    else if (v == "contra") pv = PropVariant::contra;
    else throw parse_error("unknown proposition variant '" + v + "'");
    IntervalUnion ws;
    if (j.contains("windows")) {
        for (const auto& w : j.at("windows")) ws.push_back(parse_interval(w));
    } else {
        ws.push_back(parse_interval(field(j, "window")));
    }
    return {HermitianOperator(parse_matrix(field(j, "op")), tol), pv, ws};
}

inline json proposition_to_json(const Proposition& p) {
    json out{{"op", matrix_to_json(p.op.matrix())}, {"variant", to_string(p.variant)}};
    if (p.windows.size() == 1) {
        out["window"] = interval_to_json(p.windows[0]);
    } else {
        json ws = json::array();
        for (const auto& w : p.windows) ws.push_back(interval_to_json(w));
        out["windows"] = ws;
    }
    return out;
}

inline Variant parse_variant(const std::string& s) {
    if (s == "star") return Variant::star;
    if (s == "costar") return Variant::costar;
    if (s == "clopen-star") return Variant::clopen_star;
    throw parse_error("unknown variant '" + s + "'");
}

inline BundleOpen parse_bundle_open(const json& j, const SpectralBundle& b) {
    BundleOpen out{parse_variant(field(j, "variant").get<std::string>()), b.empty_fibers()};
    const json& fibers = field(j, "fibers");
    if (!fibers.is_object()) throw parse_error("fibers must be an object keyed by context name");
    for (const auto& [label, idx] : fibers.items()) {
        const auto c = b.poset().find_name(label);
        if (!c) throw Error(ErrorCode::ContextNotInPoset, "no context named '" + label + "'");
        for (const auto& k : idx) {
            const auto i = k.get<std::size_t>();
            if (i >= b.fiber_size(*c)) throw Error(ErrorCode::PointNotInBundle, label + " has no character " + std::to_string(i));
            out.fibers[*c] |= bit(i);
        }
    }
    if (!b.is_open(out)) throw parse_error("fibers are not open for variant " + std::string(to_string(out.variant)));
    return out;
}

inline json bundle_open_to_json(const BundleOpen& u, const SpectralBundle& b) {
    json fibers = json::object();
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        json idx = json::array();
        for (std::size_t k = 0; k < b.fiber_size(c); ++k) {
            if (has_bit(u.fibers[c], k)) idx.push_back(k);
        }
        fibers[b.poset().name(c)] = idx;
    }
    return {{"variant", to_string(u.variant)}, {"fibers", fibers}};
}

inline json sieve_to_json(const Sieve& s, const ContextPoset& p) {
    json members = json::array();
    for (std::size_t m : s.members) members.push_back(p.name(m));
    return {{"base", p.name(s.base)}, {"members", members}, {"kind", s.kind == SieveKind::sieve ? "sieve" : "cosieve"}};
}

inline Sieve parse_sieve(const json& j, const ContextPoset& p) {
    Sieve s;
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind != "sieve" && kind != "cosieve") throw parse_error("kind must be sieve or cosieve");
    s.kind = kind == "sieve" ? SieveKind::sieve : SieveKind::cosieve;
    s.base = p.index_of_name(field(j, "base").get<std::string>());
    for (const auto& m : field(j, "members")) s.members.push_back(p.index_of_name(m.get<std::string>()));
    std::sort(s.members.begin(), s.members.end());
    if (!p.is_valid(s)) throw parse_error("members do not form a " + kind + " on the base");
    return s;
}

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(e.what());
    }
}

}  // namespace toposq::io
