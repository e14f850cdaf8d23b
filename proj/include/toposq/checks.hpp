#pragma once

// Property suites run by the command-line `check` command and by the
// acceptance binary. Each check returns pass/fail, a one-line summary and,
// on failure, the first counterexample found.

#include <chrono>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "toposq/fixtures.hpp"
#include "toposq/frame.hpp"
#include "toposq/random.hpp"
#include "toposq/reference.hpp"
#include "toposq/states.hpp"

namespace toposq::checks {

struct Config {
    std::uint64_t seed = 1;
    Tolerance tol;
    std::size_t cap = SpectralBundle::kDefaultCap;
};

struct Result {
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
};

struct Check {
    int criterion = 0;  // 0 for checks outside the numbered list
    std::string id;
    std::string title;
    double budget_seconds = 0.0;  // 0 means unbounded
    std::function<Result(const Config&)> run;
};

// Counts cases and keeps the first failure.
class Tally {
public:
    template <class Describe>
    void expect(bool ok, Describe&& describe) {
        ++cases_;
        if (ok) return;
        if (failures_++ == 0) first_ = describe();
    }

    std::size_t cases() const noexcept { return cases_; }
    bool ok() const noexcept { return failures_ == 0; }

    Result result(const std::string& summary) const {
        if (ok()) return {true, summary, 0.0};
        std::ostringstream os;
        os << failures_ << " of " << cases_ << " cases failed; first: " << first_;
        return {false, os.str(), 0.0};
    }

private:
    std::size_t cases_ = 0;
    std::size_t failures_ = 0;
    std::string first_;
};

inline std::string format_matrix(const Matrix& m) {
    std::ostringstream os;
    os << std::setprecision(6) << "[";
    for (long i = 0; i < m.rows(); ++i) {
        os << (i ? "; " : "");
        for (long k = 0; k < m.cols(); ++k) {
            const cplx z = m(i, k);
            os << (k ? " " : "") << z.real();
            if (std::abs(z.imag()) > 1e-12) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
        }
    }
    os << "]";
    return os.str();
}

inline std::string format_window(const ScottBasic& w) {
    std::ostringstream os;
    os << std::setprecision(6) << "(" << w.p << ", " << w.q << ")";
    return os.str();
}

inline std::string format_fibers(const Fibers& f) {
    std::ostringstream os;
    os << "{";
    for (std::size_t c = 0; c < f.size(); ++c) os << (c ? "," : "") << f[c];
    os << "}";
    return os.str();
}

inline ScottBasic random_window(gen::Rng& rng, const HermitianOperator& a) {
    const double lo = a.min_eigenvalue() - 0.5;
    const double hi = a.max_eigenvalue() + 0.5;
    double p = gen::uniform(rng, lo, hi);
    double q = gen::uniform(rng, lo, hi);
    if (p > q) std::swap(p, q);
    if (q - p < 1e-3) q = p + 0.5;
    return {p, q};
}

// A unit vector in the range of a random minimal projection of c.
inline Vector vector_in_block(gen::Rng& rng, const Context& c) {
    const Projection& q = c.minimal(gen::pick(rng, 0, c.size() - 1));
    Vector v = q.matrix() * gen::unit_vector(rng, c.dim());
    return v / v.norm();
}

// Opens of a frame, or nothing when the cap is exceeded.
inline std::optional<std::vector<BundleOpen>> elements_within(const Frame& f, std::size_t cap) {
    try {
        return f.elements(cap);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::TooLarge) throw;
        return std::nullopt;
    }
}

// Spectral-order join of commuting operators: the pointwise maximum on the
// minimal projections of the context they generate.
inline HermitianOperator commuting_spectral_join(const HermitianOperator& a, const HermitianOperator& b) {
    const Context c = context_from_operators({a, b});
    Matrix out = Matrix::Zero(long(a.dim()), long(a.dim()));
    for (std::size_t j = 0; j < c.size(); ++j) {
        const Matrix& q = c.minimal(j).matrix();
        const double r = double(c.minimal(j).rank());
        const double va = (a.matrix() * q).trace().real() / r;
        const double vb = (b.matrix() * q).trace().real() / r;
        out += std::max(va, vb) * q;
    }
    return HermitianOperator(out);
}

// ── kernel ──

inline Result spectral_order_counterexample(const Config& cfg) {
    const auto a = fixtures::A();
    const auto b1 = fixtures::B1();
    const auto b2 = fixtures::B2();
    const auto join = commuting_spectral_join(b1, b2);
    Vector w(2);
    w << cplx(0, -1), cplx(0, 1);
    const double form = (w.adjoint() * (a - join).matrix() * w)(0).real();
    Tally t;
    t.expect(loewner_leq(b1, a, cfg.tol), [] { return std::string("b1 <= a fails"); });
    t.expect(loewner_leq(b2, a, cfg.tol), [] { return std::string("b2 <= a fails"); });
    t.expect(approx_equal(join.matrix(), HermitianOperator::diagonal({-0.25, 0.0}).matrix(), 1e-12),
             [&] { return "b1 v b2 = " + format_matrix(join.matrix()); });
    t.expect(std::abs(form + 0.75) <= 1e-9, [&] { return "(w,(a - b1 v b2)w) = " + std::to_string(form); });
    t.expect(!loewner_leq(join, a, cfg.tol), [] { return std::string("b1 v b2 <= a in the Loewner order"); });
    std::ostringstream os;
    os << "b1 v b2 = diag(-1/4, 0), (w,(a - b1 v b2)w) = " << std::setprecision(12) << form
       << ", Loewner fails, spectral order " << (spectral_order_leq(join, a, cfg.tol) ? "holds" : "fails");
    return t.result(os.str());
}

inline Result spectral_order_commuting(const Config& cfg) {
    gen::Rng rng(cfg.seed);
    Tally t;
    for (int trial = 0; trial < 40; ++trial) {
        const auto c = gen::maximal_context(rng, gen::pick(rng, 2, 4));
        std::vector<HermitianOperator> family;
        for (int i = 0; i < 4; ++i) family.push_back(gen::member(rng, c));
        for (const auto& x : family) {
            for (const auto& y : family) {
                t.expect(spectral_order_leq(x, y, cfg.tol) == loewner_leq(x, y, cfg.tol),
                         [&] { return "x = " + format_matrix(x.matrix()) + ", y = " + format_matrix(y.matrix()); });
            }
        }
    }
    return t.result(std::to_string(t.cases()) + " commuting pairs agree with the Loewner order");
}

inline Result eigendecomposition_reconstructs(const Config& cfg) {
    gen::Rng rng(cfg.seed);
    Tally t;
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = gen::hermitian(rng, gen::pick(rng, 2, 5));
        const double err = max_norm(eigendecompose(a, cfg.tol).reconstruct().matrix() - a.matrix());
        worst = std::max(worst, err);
        t.expect(err <= 1e-9, [&] { return format_matrix(a.matrix()); });
    }
    std::ostringstream os;
    os << "200 operators, max reconstruction error " << std::setprecision(3) << worst;
    return t.result(os.str());
}

// ── frames ──

inline Result negation_collapse(const Config& cfg) {
    gen::Rng rng(cfg.seed);
    Tally t;
    int frames = 0, skipped = 0;
    for (int attempt = 0; frames < 20 && attempt < 200; ++attempt) {
        const SpectralBundle b(gen::poset(rng, gen::pick(rng, 2, 4), true, 3));
        const Frame f(b, Variant::star);
        const auto all = elements_within(f, std::min<std::size_t>(cfg.cap, 5000));
        if (!all) {
            ++skipped;
            continue;
        }
        ++frames;
        for (const auto& u : *all) {
            const auto neg = f.negation(u);
            t.expect(fibers_empty(u.fibers) || neg == f.bottom(),
                     [&] { return "nonempty U = " + format_fibers(u.fibers) + " has negation " + format_fibers(neg.fibers); });
            const auto dneg = f.negation(neg);
            t.expect(dneg == f.bottom() || dneg == f.top(),
                     [&] { return "double negation of " + format_fibers(u.fibers) + " is " + format_fibers(dneg.fibers); });
        }
    }
    t.expect(frames >= 20, [&] { return "only " + std::to_string(frames) + " frames within the cap"; });
    return t.result(std::to_string(frames) + " star frames with C·1, " + std::to_string(t.cases()) + " checks, " +
                    std::to_string(skipped) + " skipped over the cap");
}

inline Result regularity(const Config& cfg) {
    Tally t;
    const SpectralBundle with(fixtures::P2());
    const auto r1 = Frame(with, Variant::star).regularity_report(cfg.cap);
    t.expect(!r1.regular && r1.witness.has_value(), [] { return std::string("P2 star frame reported regular"); });
    const SpectralBundle without(build_poset({fixtures::Cz(), context_from_operators({fixtures::A()})}, false));
    const auto r2 = Frame(without, Variant::star).regularity_report(cfg.cap);
    t.expect(r2.regular, [] { return std::string("discrete M2 frame reported irregular"); });
    std::string summary = "with C·1: regular=false";
    if (r1.witness) summary += ", witness " + format_fibers(r1.witness->fibers);
    summary += "; without C·1: regular=" + std::string(r2.regular ? "true" : "false") + " (" +
               std::to_string(r2.elements) + " opens)";
    return t.result(summary);
}

inline Result psi_isomorphism(const Config& cfg) {
    Tally t;
    std::vector<std::string> counts;
    for (const auto& poset : {fixtures::P2(), fixtures::M3_four()}) {
        const SpectralBundle b(poset);
        const auto opens = b.enumerate_opens(Variant::costar, cfg.cap);
        std::vector<Subfunctor> subs;
        std::vector<std::vector<std::vector<Mask>>> masks;
        for (const auto& u : opens) {
            subs.push_back(b.psi_inverse(u));
            t.expect(b.psi(subs.back()) == u, [&] { return "psi(psi^-1(U)) != U for " + format_fibers(u.fibers); });
            std::vector<std::vector<Mask>> m(b.context_count());
            for (std::size_t c = 0; c < b.context_count(); ++c) {
                for (const auto& x : subs.back()[c]) m[c].push_back(b.characters_of(x));
                std::sort(m[c].begin(), m[c].end());
                m[c].erase(std::unique(m[c].begin(), m[c].end()), m[c].end());
            }
            masks.push_back(std::move(m));
        }
        for (std::size_t i = 0; i < subs.size(); ++i) {
            for (std::size_t j = i + 1; j < subs.size(); ++j) {
                t.expect(masks[i] != masks[j], [&] { return std::string("psi^-1 is not injective"); });
            }
        }
        for (std::size_t i = 0; i < subs.size(); ++i) {
            for (std::size_t j = 0; j < subs.size(); ++j) {
                Subfunctor both(b.context_count()), either = subs[i];
                for (std::size_t c = 0; c < b.context_count(); ++c) {
                    for (const auto& x : subs[i][c]) {
                        for (const auto& y : subs[j][c]) {
                            if (SpectralBundle::same_class(x, y, b.tolerance())) both[c].push_back(x);
                        }
                    }
                    either[c].insert(either[c].end(), subs[j][c].begin(), subs[j][c].end());
                }
                Fibers lo = opens[i].fibers, hi = opens[i].fibers;
                for (std::size_t c = 0; c < lo.size(); ++c) {
                    lo[c] &= opens[j].fibers[c];
                    hi[c] |= opens[j].fibers[c];
                }
                t.expect(b.psi(both).fibers == lo, [&] { return "meet not preserved at " + format_fibers(lo); });
                t.expect(b.psi(b.covering_closure(either)).fibers == hi,
                         [&] { return "join not preserved at " + format_fibers(hi); });
            }
        }
        const auto maps = b.enumerate_monotone_maps(cfg.cap);
        std::vector<Fibers> fibers;
        for (const auto& u : opens) fibers.push_back(u.fibers);
        t.expect(maps == fibers, [] { return std::string("costar opens differ from monotone projection maps"); });
        counts.push_back(std::to_string(opens.size()));
    }
    t.expect(counts.front() == "5", [&] { return "P2 has " + counts.front() + " costar opens"; });
    return t.result("costar opens: P2 " + counts[0] + ", M3 four-context " + counts[1] +
                    "; psi bijective, meets and joins preserved");
}

inline Result sobriety(const Config& cfg) {
    gen::Rng rng(cfg.seed);
    std::vector<ContextPoset> posets{fixtures::P2(), fixtures::M3_four()};
    for (int i = 0; i < 10; ++i) posets.push_back(gen::poset(rng, gen::pick(rng, 2, 4), i % 2 == 0));
    Tally t;
    std::size_t sets = 0, spaces = 0;
    for (const auto& p : posets) {
        if (p.size() > 8) continue;
        const SpectralBundle b(p);
        for (Variant v : {Variant::star, Variant::costar}) {
            std::vector<IrreducibleClosed> irr;
            try {
                irr = b.irreducible_closed_sets(v, std::min<std::size_t>(cfg.cap, 20000));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::TooLarge) throw;
                continue;
            }
            ++spaces;
            t.expect(irr.size() == b.point_count(), [&] {
                return std::to_string(irr.size()) + " irreducible sets for " + std::to_string(b.point_count()) + " points";
            });
            for (const auto& f : irr) {
                ++sets;
                const bool one = f.generic_points.size() == 1;
                t.expect(one && f.point_closure && f.structural &&
                             b.closure(b.single_point(f.generic_points[0]), v) == f.set,
                         [&] { return "irreducible set " + format_fibers(f.set.fibers) + " is not a unique point closure"; });
            }
        }
    }
    return t.result(std::to_string(sets) + " irreducible closed sets over " + std::to_string(spaces) +
                    " spaces, each the closure of exactly one point");
}

// ── daseinisation ──

inline Result daseinisation_oracles(const Config& cfg) {
    gen::Rng rng(cfg.seed);
    Tally t;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto c = gen::context(rng, n);
        const auto p = trial % 3 == 0 ? c.projection(Mask(gen::pick(rng, 0, c.full()))) : gen::projection(rng, n);
        t.expect(approx_equal(das_outer_proj(p, c, cfg.tol), reference::smallest_above(p, c), 1e-8) &&
                     approx_equal(das_inner_proj(p, c, cfg.tol), reference::largest_below(p, c), 1e-8),
                 [&] { return "p = " + format_matrix(p.matrix()); });
    }
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto c = gen::context(rng, n);
        const auto a = gen::hermitian(rng, n);
        const auto in = das_inner_sa(a, c, cfg.tol), out = das_outer_sa(a, c, cfg.tol);
        t.expect(spectral_order_leq(in, a, cfg.tol) && spectral_order_leq(a, out, cfg.tol),
                 [&] { return "sandwich fails for a = " + format_matrix(a.matrix()); });
    }
    double worst = 0;
    std::size_t points = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const SpectralBundle b(gen::poset(rng, gen::pick(rng, 2, 4), trial % 2 == 0));
        const auto a = gen::hermitian(rng, b.poset().dim());
        for (const auto& x : b.points()) {
            ++points;
            const auto iv = das_map(a, b, x);
            const double d = std::max(std::abs(iv.lo - antonymous_value(a, b, x)), std::abs(iv.hi - observable_value(a, b, x)));
            worst = std::max(worst, d);
            t.expect(d <= 1e-8, [&] { return "das_map off by " + std::to_string(d) + " for a = " + format_matrix(a.matrix()); });
        }
    }
    std::ostringstream os;
    os << "500 projection pairs match lattice enumeration, 200 sandwiches hold, " << points
       << " bundle points match the antonymous/observable values (max |diff| " << std::setprecision(3) << worst << ")";
    return t.result(os.str());
}

inline Result cov1_cov2_relation(const Config& cfg) {
    gen::Rng rng(cfg.seed);
    Tally t;
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralBundle b(gen::poset(rng, 3, trial % 2 == 0));
        const auto a = trial % 2 ? gen::hermitian(rng, 3)
                                 : gen::member(rng, b.poset().context(gen::pick(rng, 0, b.context_count() - 1)));
        const auto w = random_window(rng, a);
        const auto one = elementary_prop_cov1(a, w, b);
        const auto two = elementary_prop_cov2(a, w, b);
        t.expect(fibers_subset(one.fibers, two.fibers),
                 [&] { return "cov1 not inside cov2 for a = " + format_matrix(a.matrix()) + ", window " + format_window(w); });
        for (const auto& x : b.points()) {
            if (!has_bit(two.fibers[x.context], x.index)) continue;
            const auto iv = das_map(a, b, x);
            t.expect(iv.lo >= w.p - 1e-9 && iv.hi <= w.q + 1e-9,
                     [&] { return "cov2 point outside closed bounds for window " + format_window(w); });
        }
    }
    // a = r p with window (0, r): both interval ends equal r at λ(p) = 1, yet
    // the point is in neither proposition.
    const double r = 2.0;
    const SpectralBundle p2(fixtures::P2());
    const auto e1 = Projection(HermitianOperator::diagonal({1, 0}).matrix());
    const std::size_t l1 = std::size_t(__builtin_ctzll(*p2.poset().context(1).mask_of(e1)));
    const HermitianOperator a(r * e1.matrix());
    const ScottBasic w{0, r};
    const auto iv = das_map(a, p2, {1, l1});
    const bool bounds = iv.lo >= w.p && iv.hi <= w.q;
    t.expect(bounds && !has_bit(elementary_prop_cov2(a, w, p2).fibers[1], l1),
             [] { return std::string("a = r p does not separate closed bounds from cov2"); });
    return t.result("100 M3 triples: cov1 inside cov2 and cov2 inside closed bounds; a = 2 e1, window (0, 2) "
                    "meets the closed bounds but lies outside cov2");
}

// ── pairing ──

struct PairingInstance {
    std::size_t bundle;
    std::size_t base;
    Vector psi;
    HermitianOperator a;
    ScottBasic window;
    Projection p;  // for the contravariant pairing of projections
};

struct PairingData {
    std::vector<SpectralBundle> bundles;
    std::vector<PairingInstance> instances;
};

// The same seed yields the same instances, so several checks can share them.
inline PairingData pairing_data(const Config& cfg, std::size_t count = 100) {
    gen::Rng rng(cfg.seed);
    PairingData d;
    d.bundles.emplace_back(fixtures::M3_projection_rich());
    d.bundles.emplace_back(fixtures::M3_four());
    d.bundles.emplace_back(fixtures::P2());
    for (int i = 0; i < 5; ++i) d.bundles.emplace_back(gen::poset(rng, gen::pick(rng, 2, 3), i % 2 == 0));
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t bundle = k % d.bundles.size();
        const auto& b = d.bundles[bundle];
        const std::size_t base = gen::pick(rng, 0, b.context_count() - 1);
        const auto& ctx = b.poset().context(base);
        Vector psi = k % 2 ? gen::unit_vector(rng, ctx.dim()) : vector_in_block(rng, ctx);
        HermitianOperator a = k % 3 ? gen::member(rng, ctx) : gen::hermitian(rng, ctx.dim());
        const ScottBasic window = random_window(rng, a);
        Projection p = gen::projection(rng, ctx.dim());
        if (k % 3 == 0) p = range_join(p, Projection::onto(psi));
        d.instances.push_back({bundle, base, std::move(psi), std::move(a), window, std::move(p)});
    }
    return d;
}

inline bool sieve_has(const Sieve& s, std::size_t c) { return std::binary_search(s.members.begin(), s.members.end(), c); }

inline Result pairing_theorems(const Config& cfg) {
    const auto d = pairing_data(cfg);
    Tally lemma_cov2, lemma_cov1, cosieves, sieves;
    std::size_t true_cov2 = 0, true_cov1 = 0;
    for (std::size_t k = 0; k < d.instances.size(); ++k) {
        const auto& in = d.instances[k];
        const auto& b = d.bundles[in.bundle];
        const auto rho = DensityState::from_vector(in.psi, cfg.tol);
        const auto mu = covariant_state_from_state(rho, b);
        const auto describe = [&] {
            return "instance " + std::to_string(k) + ": a = " + format_matrix(in.a.matrix()) + ", window " +
                   format_window(in.window) + ", base " + b.poset().name(in.base);
        };
        const auto u2 = elementary_prop_cov2(in.a, in.window, b);
        const auto u1 = elementary_prop_cov1(in.a, in.window, b);
        const auto t2 = truth_value_cov(mu, u2, b, in.base);
        const auto t1 = truth_value_cov(mu, u1, b, in.base);
        for (std::size_t c : b.poset().above(in.base)) {
            const bool cond = cov2_state_condition(rho, in.a, in.window, b.poset().context(c), cfg.tol);
            true_cov2 += cond;
            lemma_cov2.expect(sieve_has(t2, c) == cond, describe);
        }
        for (std::size_t c = 0; c < b.context_count(); ++c) {
            const bool cond = cov1_state_condition(rho, in.a, in.window, b.poset().context(c), cfg.tol);
            true_cov1 += cond;
            lemma_cov1.expect(is_one(mu(u1, c), cfg.tol) == cond, describe);
        }
        cosieves.expect(t1.members == t2.members, describe);
        if (k < 50) {
            auto s = sup_embedding(in.p, b);
            s.variant = Variant::clopen_star;
            const auto w = pseudo_state_contra(in.psi, b);
            sieves.expect(truth_value_contra_membership(in.psi, in.p, b, in.base).members ==
                              truth_value_contra_inclusion(w, s, b, in.base).members,
                          describe);
        }
    }
    Tally all;
    for (const auto* t : {&lemma_cov2, &lemma_cov1, &cosieves, &sieves}) {
        all.expect(t->ok(), [&] { return t->result("").detail; });
    }
    std::ostringstream os;
    os << d.instances.size() << " instances: cov2 state condition matches the cosieve at " << lemma_cov2.cases()
       << " contexts (" << true_cov2 << " true), cov1 support condition matches mu = 1 at " << lemma_cov1.cases()
       << " contexts (" << true_cov1 << " true), cov1/cov2 cosieves equal on all; contravariant sieves agree on "
       << sieves.cases() << " (psi, p, C)";
    return all.result(os.str());
}

inline Result literal_expectation_reading(const Config& cfg) {
    Tally t;
    const auto d = pairing_data(cfg);
    for (const auto& in : d.instances) {
        const auto& b = d.bundles[in.bundle];
        const auto rho = DensityState::from_vector(in.psi, cfg.tol);
        const auto mu = covariant_state_from_state(rho, b);
        const auto u1 = elementary_prop_cov1(in.a, in.window, b);
        for (std::size_t c = 0; c < b.context_count(); ++c) {
            if (!is_one(mu(u1, c), cfg.tol)) continue;
            t.expect(cov1_expectation_condition(rho, in.a, in.window, b.poset().context(c), cfg.tol),
                     [&] { return "cov1 true but expectation outside window " + format_window(in.window); });
        }
    }
    const std::size_t forward = t.cases();
    const SpectralBundle p2(fixtures::P2());
    const auto a = HermitianOperator::diagonal({0, 2});
    const ScottBasic w{0.5, 1.5};
    const DensityState half(HermitianOperator(Matrix::Identity(2, 2) * 0.5), cfg.tol);
    const auto mu = covariant_state_from_state(half, p2);
    t.expect(cov1_expectation_condition(half, a, w, p2.poset().context(1), cfg.tol) &&
                 !is_one(mu(elementary_prop_cov1(a, w, p2), 1), cfg.tol),
             [] { return std::string("counterexample did not reproduce"); });
    return t.result("truth implies the expectation reading at " + std::to_string(forward) +
                    " true contexts; converse fails for a = diag(0,2), window (1/2, 3/2), rho = 1/2 at Cz");
}

inline Result covariant_forces_contravariant(const Config& cfg) {
    const auto d = pairing_data(cfg);
    Tally t;
    std::size_t forced = 0, contexts = 0;
    for (std::size_t k = 0; k < d.instances.size(); ++k) {
        const auto& in = d.instances[k];
        const auto& b = d.bundles[in.bundle];
        const auto mu = covariant_state_from_state(DensityState::from_vector(in.psi, cfg.tol), b);
        if (truth_value_cov(mu, elementary_prop_cov2(in.a, in.window, b), b, in.base).members.empty()) continue;
        ++forced;
        const Projection chi = spectral_projection(in.a, in.window.as_interval(), cfg.tol);
        for (std::size_t c = 0; c < b.context_count(); ++c) {
            ++contexts;
            t.expect(truth_value_contra_membership(in.psi, chi, b, c).members == b.poset().below(c),
                     [&] { return "instance " + std::to_string(k) + " false at " + b.poset().name(c); });
        }
    }
    t.expect(forced > 0, [] { return std::string("no instance had a true covariant pairing"); });
    return t.result(std::to_string(forced) + " of " + std::to_string(d.instances.size()) +
                    " instances true covariantly; contravariant truth holds at all " + std::to_string(contexts) +
                    " contexts checked");
}

inline Result measure_round_trip(const Config& cfg) {
    gen::Rng rng(cfg.seed);
    Tally t;
    const SpectralBundle b(fixtures::M3_projection_rich());
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const DensityState rho(gen::density(rng, 3), cfg.tol);
        const auto mu = covariant_state_from_state(rho, b);
        const auto back = reconstruct_state(restrict_measure(mu, b), b);
        const double err = max_norm(back.rho().matrix() - rho.rho().matrix());
        worst = std::max(worst, err);
        t.expect(err <= 1e-6, [&] { return "rho = " + format_matrix(rho.rho().matrix()); });
    }
    const SpectralBundle p2(fixtures::P2());
    std::string p2_report = "no error";
    try {
        const auto mu = covariant_state_from_state(DensityState::from_vector(fixtures::psi(), cfg.tol), p2);
        reconstruct_state(restrict_measure(mu, p2), p2);
    } catch (const Error& e) {
        p2_report = to_string(e.code());
    }
    t.expect(p2_report == "Underdetermined", [&] { return "P2 reconstruction gave " + p2_report; });
    std::ostringstream os;
    os << "20 states recovered, max entry error " << std::setprecision(3) << worst << "; P2 reports " << p2_report;
    return t.result(os.str());
}

// ── ks ──

inline Result kochen_specker(const Config&) {
    Tally t;
    const SpectralBundle ks(fixtures::cabello_poset());
    const auto sections = ks.global_sections();
    t.expect(sections.empty(), [&] { return std::to_string(sections.size()) + " global sections on the KS fixture"; });
    const auto p2 = SpectralBundle(fixtures::P2()).global_sections();
    t.expect(p2.size() == 2, [&] { return std::to_string(p2.size()) + " global sections on P2"; });
    return t.result(std::to_string(sections.size()) + " global sections (" + std::to_string(fixtures::cabello_contexts().size()) +
                    " seed contexts, " + std::to_string(ks.context_count()) + " in the poset); P2 has " +
                    std::to_string(p2.size()));
}

// ── registry ──

inline std::vector<Check> suite(const std::string& name) {
    std::vector<Check> kernel{
        {1, "spectral-order", "spectral-order counterexample", 1.0, spectral_order_counterexample},
        {0, "commuting-order", "spectral order equals Loewner on commuting operators", 0.0, spectral_order_commuting},
        {0, "eigendecomposition", "spectral resolutions reconstruct the operator", 0.0, eigendecomposition_reconstructs},
    };
    std::vector<Check> frames{
        {2, "negation", "negation collapse with C·1", 30.0, negation_collapse},
        {3, "regularity", "non-regularity with C·1, regularity without", 0.0, regularity},
        {4, "psi", "frame isomorphism and monotone-map count", 10.0, psi_isomorphism},
        {5, "sobriety", "irreducible closed sets are point closures", 0.0, sobriety},
    };
    std::vector<Check> das{
        {6, "daseinisation", "daseinisation against brute-force oracles", 0.0, daseinisation_oracles},
        {7, "cov1-cov2", "cov1 inside cov2 and closed-endpoint bounds", 0.0, cov1_cov2_relation},
    };
    std::vector<Check> pairing{
        {8, "pairing", "state conditions, cosieve and sieve equalities", 60.0, pairing_theorems},
        {0, "literal-reading", "expectation reading is implied but not equivalent", 0.0, literal_expectation_reading},
        {9, "cov-implies-contra", "covariant truth forces contravariant truth", 0.0, covariant_forces_contravariant},
        {11, "round-trip", "measure to state reconstruction", 0.0, measure_round_trip},
    };
    std::vector<Check> ks{
        {10, "kochen-specker", "global sections on the KS fixture", 5.0, kochen_specker},
    };
    if (name == "kernel") return kernel;
    if (name == "frames") return frames;
    if (name == "daseinisation") return das;
    if (name == "pairing") return pairing;
    if (name == "ks") return ks;
    if (name == "all") {
        std::vector<Check> out;
        for (auto* s : {&kernel, &frames, &das, &pairing, &ks}) out.insert(out.end(), s->begin(), s->end());
        return out;
    }
    throw std::invalid_argument("unknown suite '" + name + "'");
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"kernel", "frames", "daseinisation", "pairing", "ks", "all"};
    return names;
}

inline Result run(const Check& check, const Config& cfg) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
        r = check.run(cfg);
    } catch (const std::exception& e) {
        r = {false, std::string("raised: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (check.budget_seconds > 0 && r.seconds > check.budget_seconds) {
        std::ostringstream os;
        os << "took " << std::setprecision(3) << r.seconds << " s, budget " << check.budget_seconds << " s; "
           << r.detail;
        r.pass = false;
        r.detail = os.str();
    }
    return r;
}

}  // namespace toposq::checks
