// toposq: command-line workbench over context posets, daseinisation,
// propositions, truth values, frames and the property suites.
//
// Exit codes: 0 ok, 1 check failure, 2 usage or invalid input,
// 3 non-commuting generators, 4 unknown context, 5 frame or approach mismatch.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "toposq/checks.hpp"
#include "toposq/io.hpp"
#include "toposq/toposq.hpp"

using namespace toposq;
using io::json;

namespace {

struct Options {
    double tol = kDefaultTol;
    bool include_trivial = true;
    std::uint64_t seed = 1;
    std::size_t cap = SpectralBundle::kDefaultCap;
    bool json = false;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io::parse_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return io::parse_json_text(ss.str());
}

ContextPoset load_poset(const std::string& path, const Options& o) {
    return io::parse_poset(read_json(path), o.include_trivial, Tolerance(o.tol));
}

// An operator file holds a matrix, or an object with the matrix under "op".
HermitianOperator load_operator(const std::string& path, const Options& o) {
    const json j = read_json(path);
    return HermitianOperator(io::parse_matrix(j.contains("op") ? j.at("op") : j), Tolerance(o.tol));
}

std::size_t context_index(const ContextPoset& p, const std::string& label) { return p.index_of_name(label); }

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string plural(std::size_t n, const char* word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::string format_mask(Mask m, std::size_t size) {
    std::string out = "{";
    bool first = true;
    for (std::size_t k = 0; k < size; ++k) {
        if (!has_bit(m, k)) continue;
        out += (first ? "" : ",") + std::to_string(k);
        first = false;
    }
    return out + "}";
}

void print_open(const BundleOpen& u, const SpectralBundle& b) {
    std::cout << "variant " << to_string(u.variant) << "\n";
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        std::cout << "  " << b.poset().name(c) << ": " << format_mask(u.fibers[c], b.fiber_size(c)) << "\n";
    }
}

void print_sieve(const Sieve& s, const ContextPoset& p) {
    std::cout << (s.kind == SieveKind::sieve ? "sieve" : "cosieve") << " on " << p.name(s.base) << ": {";
    for (std::size_t i = 0; i < s.members.size(); ++i) std::cout << (i ? ", " : "") << p.name(s.members[i]);
    std::cout << "}\n";
}

// ── commands ──

int cmd_contexts(const std::string& path, const Options& o) {
    const auto p = load_poset(path, o);
    const auto edges = p.hasse_edges();
    if (o.json) {
        json out = io::poset_to_json(p);
        json e = json::array();
        for (const auto& [lo, hi] : edges) e.push_back({p.name(lo), p.name(hi)});
        out["hasse_edges"] = e;
        emit(out);
        return 0;
    }
    std::cout << plural(p.size(), "context") << ", " << plural(edges.size(), "edge") << "\n";
    for (std::size_t c = 0; c < p.size(); ++c) {
        std::cout << "  " << p.name(c) << ": " << plural(p.context(c).size(), "block") << ", ranks";
        for (const auto& q : p.context(c).minimal_projections()) std::cout << " " << q.rank();
        std::cout << "\n";
    }
    for (const auto& [lo, hi] : edges) std::cout << "  " << p.name(lo) << " < " << p.name(hi) << "\n";
    return 0;
}

int cmd_spectrum(const std::string& path, const std::string& label, const Options& o) {
    const SpectralBundle b(load_poset(path, o));
    std::vector<std::size_t> which;
    if (label.empty()) {
        for (std::size_t c = 0; c < b.context_count(); ++c) which.push_back(c);
    } else {
        which.push_back(context_index(b.poset(), label));
    }
    json out = json::array();
    for (std::size_t c : which) {
        const Context& ctx = b.poset().context(c);
        json chars = json::array();
        if (!o.json) std::cout << b.poset().name(c) << ": " << plural(ctx.size(), "character") << "\n";
        for (std::size_t k = 0; k < ctx.size(); ++k) {
            chars.push_back({{"index", k}, {"rank", ctx.minimal(k).rank()}, {"projection", io::matrix_to_json(ctx.minimal(k).matrix())}});
            if (!o.json) {
                std::cout << "  " << k << ": rank " << ctx.minimal(k).rank() << " "
                          << checks::format_matrix(ctx.minimal(k).matrix()) << "\n";
            }
        }
        out.push_back({{"context", b.poset().name(c)}, {"characters", chars}});
    }
    if (o.json) emit(out);
    return 0;
}

int cmd_das(const std::string& op_path, const std::string& poset_path, const std::string& label,
            const std::string& mode, const Options& o) {
    const SpectralBundle b(load_poset(poset_path, o));
    const auto a = load_operator(op_path, o);
    const std::size_t c = context_index(b.poset(), label);
    const Context& ctx = b.poset().context(c);
    const Tolerance tol(o.tol);
    json out{{"context", label}};
    if (mode != "inner") out["outer"] = io::matrix_to_json(das_outer_sa(a, ctx, tol).matrix());
    if (mode != "outer") out["inner"] = io::matrix_to_json(das_inner_sa(a, ctx, tol).matrix());
    json rows = json::array();
    for (std::size_t k = 0; k < ctx.size(); ++k) {
        const auto iv = das_map(a, b, {c, k});
        rows.push_back({{"index", k}, {"interval", {iv.lo, iv.hi}}});
    }
    out["characters"] = rows;
    if (o.json) {
        emit(out);
        return 0;
    }
    std::cout << "context " << label << "\n";
    if (mode != "inner") std::cout << "outer " << checks::format_matrix(das_outer_sa(a, ctx, tol).matrix()) << "\n";
    if (mode != "outer") std::cout << "inner " << checks::format_matrix(das_inner_sa(a, ctx, tol).matrix()) << "\n";
    for (std::size_t k = 0; k < ctx.size(); ++k) {
        const auto iv = das_map(a, b, {c, k});
        std::cout << "  character " << k << ": [" << iv.lo << ", " << iv.hi << "]\n";
    }
    return 0;
}

int cmd_prop(const std::string& prop_path, const std::string& poset_path, const Options& o) {
    const SpectralBundle b(load_poset(poset_path, o));
    const auto prop = io::parse_proposition(read_json(prop_path), Tolerance(o.tol));
    const auto u = prop.evaluate(b);
    if (o.json) {
        emit(io::bundle_open_to_json(u, b));
    } else {
        std::cout << to_string(prop.variant) << " proposition, ";
        print_open(u, b);
    }
    return 0;
}

int cmd_truth(const std::string& state_path, const std::string& prop_path, const std::string& poset_path,
              const std::string& approach, const std::string& base_label, const Options& o) {
    const SpectralBundle b(load_poset(poset_path, o));
    const Tolerance tol(o.tol);
    const auto state = io::parse_state(read_json(state_path), tol);
    const auto prop = io::parse_proposition(read_json(prop_path), tol);
    const std::size_t base = context_index(b.poset(), base_label);
    const bool covariant_prop = prop.variant != io::PropVariant::contra;
    if ((approach == "cov") != covariant_prop) {
        throw Error(ErrorCode::ModeMismatch,
                    std::string(to_string(prop.variant)) + " proposition cannot be paired in the " + approach + " approach");
    }
    const auto u = prop.evaluate(b);
    Sieve s;
    if (approach == "cov") {
        s = truth_value_cov(covariant_state_from_state(state.density, b), u, b, base);
    } else {
        s = truth_value_contra_measure(measure_from_state(state.density, b), u, b, base);
    }
    if (o.json) {
        emit(io::sieve_to_json(s, b.poset()));
    } else {
        print_sieve(s, b.poset());
    }
    return 0;
}

int cmd_frame(const std::string& poset_path, const std::string& variant, const std::string& open_path,
              const Options& o) {
    const SpectralBundle b(load_poset(poset_path, o));
    const Frame f(b, io::parse_variant(variant));
    const auto report = f.regularity_report(o.cap);
    json out{{"variant", variant}, {"opens", report.elements}, {"regular", report.regular}};
    if (report.witness) out["witness"] = io::bundle_open_to_json(*report.witness, b);
    std::optional<BundleOpen> u, neg;
    if (!open_path.empty()) {
        u = io::parse_bundle_open(read_json(open_path), b);
        if (u->variant != f.variant()) throw Error(ErrorCode::FrameMismatch, "open is not in the requested frame");
        neg = f.negation(*u);
        out["negation"] = io::bundle_open_to_json(*neg, b);
        out["double_negation"] = io::bundle_open_to_json(f.negation(*neg), b);
    }
    if (o.json) {
        emit(out);
        return 0;
    }
    std::cout << variant << " frame: " << plural(report.elements, "open") << ", "
              << (report.regular ? "regular" : "not regular") << "\n";
    if (report.witness) {
        std::cout << "witness (not the join of opens well inside it): ";
        print_open(*report.witness, b);
    }
    if (neg) {
        std::cout << "negation: ";
        print_open(*neg, b);
    }
    return 0;
}

int cmd_check(const std::string& name, const Options& o) {
    const auto& names = checks::suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::cerr << "error: unknown suite '" << name << "' (kernel, frames, daseinisation, pairing, ks, all)\n";
        return 2;
    }
    checks::Config cfg;
    cfg.seed = o.seed;
    cfg.tol = Tolerance(o.tol);
    cfg.cap = o.cap;
    bool all_pass = true;
    json out = json::array();
    if (!o.json) std::cout << "suite " << name << ", seed " << o.seed << "\n";
    for (const auto& check : checks::suite(name)) {
        const auto r = checks::run(check, cfg);
        all_pass = all_pass && r.pass;
        if (o.json) {
            out.push_back({{"id", check.id}, {"title", check.title}, {"pass", r.pass}, {"detail", r.detail}});
        } else {
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << check.id << ": " << r.detail << "\n";
        }
    }
    if (o.json) emit({{"suite", name}, {"seed", o.seed}, {"checks", out}, {"pass", all_pass}});
    return all_pass ? 0 : 1;
}

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonCommutingGenerators: return 3;
        case ErrorCode::ContextNotInPoset: return 4;
        case ErrorCode::ModeMismatch:
        case ErrorCode::FrameMismatch: return 5;
        default: return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context posets, daseinisation and truth values for finite quantum systems"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--tol", o.tol, "numerical tolerance, 0 <= tol < 1e-3")->capture_default_str();
    app.add_flag("--include-trivial,!--no-include-trivial", o.include_trivial,
                 "add C·1 when the poset file does not say (default on)");
    app.add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
    app.add_option("--cap", o.cap, "enumeration cap")->check(CLI::PositiveNumber)->capture_default_str();
    auto* as_json = app.add_flag("--json", o.json, "emit JSON");
    app.add_flag("--text", [&o](std::int64_t) { o.json = false; }, "emit text (default)")->excludes(as_json);

    std::string poset, op, prop, state, label, mode = "both", approach, variant = "star", open_file, suite;

    auto* contexts = app.add_subcommand("contexts", "build a context poset and list it");
    contexts->add_option("poset", poset, "poset JSON")->required();

    auto* spectrum = app.add_subcommand("spectrum", "characters of each context");
    spectrum->add_option("poset", poset, "poset JSON")->required();
    spectrum->add_option("--context", label, "restrict to one context");

    auto* das = app.add_subcommand("das", "inner and outer daseinisation of an operator");
    das->add_option("op", op, "operator JSON")->required();
    das->add_option("poset", poset, "poset JSON")->required();
    das->add_option("--context", label, "context label")->required();
    das->add_option("--mode", mode, "outer, inner or both")->check(CLI::IsMember({"outer", "inner", "both"}));

    auto* propc = app.add_subcommand("prop", "evaluate an elementary proposition as a bundle open");
    propc->add_option("prop", prop, "proposition JSON")->required();
    propc->add_option("poset", poset, "poset JSON")->required();

    auto* truth = app.add_subcommand("truth", "truth value of a proposition in a state");
    truth->add_option("state", state, "state JSON")->required();
    truth->add_option("prop", prop, "proposition JSON")->required();
    truth->add_option("poset", poset, "poset JSON")->required();
    truth->add_option("--approach", approach, "contra or cov")->required()->check(CLI::IsMember({"contra", "cov"}));
    truth->add_option("--base", label, "base context label")->required();

    auto* frame = app.add_subcommand("frame", "regularity and negation in a frame of opens");
    frame->add_option("poset", poset, "poset JSON")->required();
    frame->add_option("--variant", variant, "star, costar or clopen-star")
        ->check(CLI::IsMember({"star", "costar", "clopen-star"}));
    frame->add_option("--open", open_file, "bundle open JSON to negate");

    auto* check = app.add_subcommand("check", "run a property suite");
    check->add_option("suite", suite, "kernel, frames, daseinisation, pairing, ks or all")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*contexts) return cmd_contexts(poset, o);
        if (*spectrum) return cmd_spectrum(poset, label, o);
        if (*das) return cmd_das(op, poset, label, mode, o);
        if (*propc) return cmd_prop(prop, poset, o);
        if (*truth) return cmd_truth(state, prop, poset, approach, label, o);
        if (*frame) return cmd_frame(poset, variant, open_file, o);
        if (*check) return cmd_check(suite, o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
