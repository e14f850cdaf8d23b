#pragma once

// The bundle of Gelfand spectra over a context poset, its two Alexandrov
// topologies (restriction-closed "star" and extension-closed "costar"),
// the lattice L_C with its covering relation, the frame map Psi,
// irreducible closed sets and global sections.

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "toposq/context.hpp"

namespace toposq {

enum class Variant { star, costar, clopen_star };

inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::star: return "star";
        case Variant::costar: return "costar";
        case Variant::clopen_star: return "clopen-star";
    }
    return "?";
}

// Star and clopen-star share the restriction-closed openness condition.
inline bool restriction_closed(Variant v) { return v != Variant::costar; }

// A character of the context with poset index `context`, selecting the
// minimal projection `index`. Doubles as a bundle point.
struct Character {
    std::size_t context = 0;
    std::size_t index = 0;
    friend bool operator==(const Character&, const Character&) = default;
    friend auto operator<=>(const Character&, const Character&) = default;
};

using Fibers = std::vector<Mask>;

struct BundleOpen {
    Variant variant = Variant::star;
    Fibers fibers;
    friend bool operator==(const BundleOpen&, const BundleOpen&) = default;
};

struct BundleClosed {
    Variant variant = Variant::star;
    Fibers fibers;
    friend bool operator==(const BundleClosed&, const BundleClosed&) = default;
};

inline std::size_t popcount(Mask m) { return std::size_t(__builtin_popcountll(m)); }

inline bool fibers_empty(const Fibers& f) {
    return std::all_of(f.begin(), f.end(), [](Mask m) { return m == 0; });
}

inline bool fibers_subset(const Fibers& a, const Fibers& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] & ~b[i]) return false;
    }
    return true;
}

// λ(a) for the character selecting minimal projection k of C.
inline double evaluate(const Context& c, std::size_t k, const HermitianOperator& a, Tolerance tol = {}) {
    const auto coeff = c.coefficients(a.matrix(), tol);
    if (!coeff) throw Error(ErrorCode::NotInContext, "operator is not in context " + c.key());
    return coeff->at(k);
}

// L_C class D_a, realized by the support of a⁺ plus a representative.
struct LClass {
    std::size_t context = 0;
    Projection support;
    HermitianOperator representative;
};

using Subfunctor = std::vector<std::vector<LClass>>;

struct IrreducibleClosed {
    BundleClosed set;
    std::vector<Character> generic_points;  // points whose closure is the set
    bool point_closure = false;             // exactly one generic point
    bool structural = false;                // per-variant fiber conditions
};

class SpectralBundle {
public:
    explicit SpectralBundle(ContextPoset poset) : poset_(std::move(poset)) {
        const std::size_t n = poset_.size();
        const Tolerance tol = poset_.tolerance();
        offsets_.resize(n + 1, 0);
        for (std::size_t c = 0; c < n; ++c) offsets_[c + 1] = offsets_[c] + poset_.context(c).size();
        restrict_.assign(n * n, {});
        candidates_.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t d = 0; d < n; ++d) {
                if (!poset_.leq(d, c)) continue;
                const Context& cc = poset_.context(c);
                const Context& dc = poset_.context(d);
                auto& table = restrict_[c * n + d];
                for (std::size_t k = 0; k < cc.size(); ++k) {
                    std::size_t found = dc.size();
                    for (std::size_t j = 0; j < dc.size(); ++j) {
                        if (leq(cc.minimal(k), dc.minimal(j), tol)) found = j;
                    }
                    if (found == dc.size()) throw Error(ErrorCode::InvalidContext, "restriction not found");
                    table.push_back(found);
                }
            }
        }
    }

    const ContextPoset& poset() const noexcept { return poset_; }
    Tolerance tolerance() const noexcept { return poset_.tolerance(); }
    std::size_t context_count() const noexcept { return poset_.size(); }
    std::size_t fiber_size(std::size_t c) const { return poset_.context(c).size(); }
    Mask full_fiber(std::size_t c) const { return full_mask(fiber_size(c)); }
    std::size_t point_count() const noexcept { return offsets_.back(); }
    std::size_t point_index(Character x) const { return offsets_.at(x.context) + x.index; }

    std::vector<Character> spectrum(std::size_t c) const {
        std::vector<Character> out;
        for (std::size_t k = 0; k < fiber_size(c); ++k) out.push_back({c, k});
        return out;
    }
    std::vector<Character> points() const {
        std::vector<Character> out;
        for (std::size_t c = 0; c < context_count(); ++c) {
            for (std::size_t k = 0; k < fiber_size(c); ++k) out.push_back({c, k});
        }
        return out;
    }
    void check_point(Character x) const {
        if (x.context >= context_count() || x.index >= fiber_size(x.context)) {
            throw Error(ErrorCode::PointNotInBundle,
                        "(" + std::to_string(x.context) + "," + std::to_string(x.index) + ")");
        }
    }

    double evaluate(Character x, const HermitianOperator& a) const {
        check_point(x);
        return toposq::evaluate(poset_.context(x.context), x.index, a, tolerance());
    }

    // ── Restriction of characters ──

    std::size_t restrict_index(std::size_t c, std::size_t k, std::size_t d) const {
        const auto& t = restrict_.at(c * context_count() + d);
        if (t.empty()) {
            throw Error(ErrorCode::NotASubcontext, poset_.name(d) + " is not contained in " + poset_.name(c));
        }
        return t.at(k);
    }
    Character restrict_character(Character x, std::size_t d) const {
        check_point(x);
        return {d, restrict_index(x.context, x.index, d)};
    }
    Mask restrict_mask(std::size_t c, Mask m, std::size_t d) const {
        Mask out = 0;
        for (std::size_t k = 0; k < fiber_size(c); ++k) {
            if (has_bit(m, k)) out |= bit(restrict_index(c, k, d));
        }
        return out;
    }
    // Characters of C (⊇ D) whose restriction lies in m.
    Mask lift_mask(std::size_t d, Mask m, std::size_t c) const {
        Mask out = 0;
        for (std::size_t k = 0; k < fiber_size(c); ++k) {
            if (has_bit(m, restrict_index(c, k, d))) out |= bit(k);
        }
        return out;
    }

    // ── Fiber sets ──

    Fibers empty_fibers() const { return Fibers(context_count(), 0); }
    Fibers full_fibers() const {
        Fibers f(context_count());
        for (std::size_t c = 0; c < f.size(); ++c) f[c] = full_fiber(c);
        return f;
    }
    Fibers complement(const Fibers& f) const {
        check_fibers(f);
        Fibers out(f.size());
        for (std::size_t c = 0; c < f.size(); ++c) out[c] = full_fiber(c) & ~f[c];
        return out;
    }
    Fibers single_point(Character x) const {
        check_point(x);
        Fibers f = empty_fibers();
        f[x.context] = bit(x.index);
        return f;
    }
    void check_fibers(const Fibers& f) const {
        if (f.size() != context_count()) {
            throw Error(ErrorCode::FrameMismatch, "fiber map does not match the poset");
        }
        for (std::size_t c = 0; c < f.size(); ++c) {
            if (f[c] & ~full_fiber(c)) throw Error(ErrorCode::PointNotInBundle, "fiber index out of range");
        }
    }

    BundleOpen top(Variant v) const { return {v, full_fibers()}; }
    BundleOpen bottom(Variant v) const { return {v, empty_fibers()}; }

    bool is_open(const Fibers& f, Variant v) const {
        check_fibers(f);
        const std::size_t n = context_count();
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t d = 0; d < n; ++d) {
                if (c == d || !poset_.leq(d, c)) continue;
                if (restriction_closed(v)) {
                    if (restrict_mask(c, f[c], d) & ~f[d]) return false;
                } else if (lift_mask(d, f[d], c) & ~f[c]) {
                    return false;
                }
            }
        }
        return true;
    }
    bool is_open(const BundleOpen& u) const { return is_open(u.fibers, u.variant); }
    bool is_closed(const BundleClosed& f) const { return is_open(complement(f.fibers), f.variant); }

    // Smallest open of the variant containing f.
    BundleOpen saturate(const Fibers& f, Variant v) const {
        check_fibers(f);
        return {v, restriction_closed(v) ? down_closure(f) : up_closure(f)};
    }

    // Largest open of the variant inside f.
    BundleOpen interior(const Fibers& f, Variant v) const {
        check_fibers(f);
        const std::size_t n = context_count();
        Fibers out = empty_fibers();
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t k = 0; k < fiber_size(c); ++k) {
                if (!has_bit(f[c], k)) continue;
                bool keep = true;
                for (std::size_t d = 0; d < n && keep; ++d) {
                    if (restriction_closed(v)) {
                        if (poset_.leq(d, c) && !has_bit(f[d], restrict_index(c, k, d))) keep = false;
                    } else if (poset_.leq(c, d) && (lift_mask(c, bit(k), d) & ~f[d])) {
                        keep = false;
                    }
                }
                if (keep) out[c] |= bit(k);
            }
        }
        return {v, out};
    }

    // Smallest closed set of the variant containing f.
    BundleClosed closure(const Fibers& f, Variant v) const {
        check_fibers(f);
        return {v, restriction_closed(v) ? up_closure(f) : down_closure(f)};
    }

    BundleClosed complement(const BundleOpen& u) const { return {u.variant, complement(u.fibers)}; }
    BundleOpen complement(const BundleClosed& f) const { return {f.variant, complement(f.fibers)}; }

    // ── Enumeration ──

    // Visits every open of the variant; throws TooLarge past cap.
    void for_each_open(Variant v, std::size_t cap, const std::function<void(const Fibers&)>& visit) const {
        const std::size_t n = context_count();
        // Contexts are sorted by block count, so index order is a linear
        // extension of inclusion: star fills coarse first, costar fine first.
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = restriction_closed(v) ? i : n - 1 - i;
        Fibers cur = empty_fibers();
        std::size_t count = 0;
        std::function<void(std::size_t)> rec = [&](std::size_t pos) {
            if (pos == n) {
                if (++count > cap) throw Error(ErrorCode::TooLarge, "more than " + std::to_string(cap) + " opens");
                visit(cur);
                return;
            }
            const std::size_t c = order[pos];
            Mask allowed = full_fiber(c);
            for (std::size_t d = 0; d < n; ++d) {
                if (d == c) continue;
                if (restriction_closed(v) && poset_.leq(d, c)) {
                    for (std::size_t k = 0; k < fiber_size(c); ++k) {
                        if (!has_bit(cur[d], restrict_index(c, k, d))) allowed &= ~bit(k);
                    }
                } else if (!restriction_closed(v) && poset_.leq(c, d)) {
                    for (std::size_t k = 0; k < fiber_size(c); ++k) {
                        if (lift_mask(c, bit(k), d) & ~cur[d]) allowed &= ~bit(k);
                    }
                }
            }
            for (Mask sub = allowed;; sub = (sub - 1) & allowed) {
                cur[c] = sub;
                rec(pos + 1);
                if (sub == 0) break;
            }
            cur[c] = 0;
        };
        rec(0);
    }

    std::vector<BundleOpen> enumerate_opens(Variant v, std::size_t cap = kDefaultCap) const {
        std::vector<BundleOpen> out;
        for_each_open(v, cap, [&](const Fibers& f) { out.push_back({v, f}); });
        std::sort(out.begin(), out.end(), [](const BundleOpen& a, const BundleOpen& b) { return a.fibers < b.fibers; });
        return out;
    }

    std::size_t count_opens(Variant v, std::size_t cap = kDefaultCap) const {
        std::size_t count = 0;
        for_each_open(v, cap, [&](const Fibers&) { ++count; });
        return count;
    }

    // Monotone maps S with S(C) ∈ P(C) and C ⊆ C' ⇒ S(C) ≤ S(C'), decided
    // with projection arithmetic. S(C) is given by its character set.
    std::vector<Fibers> enumerate_monotone_maps(std::size_t cap = kDefaultCap) const {
        const std::size_t n = context_count();
        const Tolerance tol = tolerance();
        std::vector<std::vector<Projection>> lattice(n);
        for (std::size_t c = 0; c < n; ++c) {
            for (Mask m = 0; m <= full_fiber(c); ++m) lattice[c].push_back(poset_.context(c).projection(m));
        }
        std::vector<Fibers> out;
        Fibers cur = empty_fibers();
        std::function<void(std::size_t)> rec = [&](std::size_t c) {
            if (c == n) {
                if (out.size() >= cap) throw Error(ErrorCode::TooLarge, "more than " + std::to_string(cap) + " maps");
                out.push_back(cur);
                return;
            }
            for (Mask m = 0; m <= full_fiber(c); ++m) {
                bool ok = true;
                for (std::size_t d = 0; d < c && ok; ++d) {
                    if (poset_.leq(d, c)) ok = leq(lattice[d][cur[d]], lattice[c][m], tol);
                }
                if (!ok) continue;
                cur[c] = m;
                rec(c + 1);
            }
            cur[c] = 0;
        };
        rec(0);
        std::sort(out.begin(), out.end());
        return out;
    }

    // ── L_C and the covering relation ──

    LClass l_class(const HermitianOperator& a, std::size_t c) const {
        poset_.check_index(c);
        if (!poset_.context(c).contains(a.matrix(), tolerance())) {
            throw Error(ErrorCode::NotInContext, "operator is not in context " + poset_.name(c));
        }
        return {c, support_of_positive_part(a, tolerance()), a};
    }

    // Class with X = m, represented by Σ_{k ∈ m} (k+1) p_k.
    LClass l_class_of_mask(std::size_t c, Mask m) const {
        const Context& ctx = poset_.context(c);
        Matrix rep = Matrix::Zero(long(ctx.dim()), long(ctx.dim()));
        for (std::size_t k = 0; k < ctx.size(); ++k) {
            if (has_bit(m, k)) rep += double(k + 1) * ctx.minimal(k).matrix();
        }
        return l_class(HermitianOperator(rep), c);
    }

    // X^C_a: characters of the support.
    Mask characters_of(const LClass& x) const {
        const auto m = poset_.context(x.context).mask_of(x.support, tolerance());
        if (!m) throw Error(ErrorCode::NotInContext, "support is not in the context");
        return *m;
    }

    // Supports of (a - q)⁺ for q > 0. The support is piecewise constant in q,
    // so q sweeps one value below the least positive eigenvalue and the
    // midpoints between positive ones.
    std::vector<Projection> sweep_supports(const LClass& target) const {
        const Tolerance tol = tolerance();
        const std::size_t n = poset_.dim();
        const auto res = eigendecompose(target.representative, tol);
        std::vector<double> positive;
        for (double l : res.thresholds) {
            if (l > tol.value()) positive.push_back(l);
        }
        std::vector<double> sweep;
        if (!positive.empty()) sweep.push_back(positive.front() / 2);
        for (std::size_t i = 0; i + 1 < positive.size(); ++i) sweep.push_back((positive[i] + positive[i + 1]) / 2);
        std::vector<Projection> out;
        for (double q : sweep) {
            out.push_back(support_of_positive_part(target.representative - q * HermitianOperator::identity(n), tol));
        }
        return out;
    }

    // D_target ◁ U: for every q > 0, supp((a - q)⁺) ≤ ⋁ supports of U.
    bool covers(const LClass& target, const std::vector<LClass>& u, std::size_t c) const {
        if (target.context != c) throw Error(ErrorCode::NotInContext, "target class from another context");
        return covered(sweep_supports(target), support_join(u, c));
    }

    static bool same_class(const LClass& a, const LClass& b, Tolerance tol) {
        return a.context == b.context && approx_equal(a.support, b.support, tol);
    }

    // Ψ(U)_C = ⋃ X^C_a over D_a ∈ U(C). base restricts the domain to ↑base.
    BundleOpen psi(const Subfunctor& u, std::optional<std::size_t> base = std::nullopt) const {
        validate_subfunctor(u, base);
        Fibers f = empty_fibers();
        for (std::size_t c = 0; c < u.size(); ++c) {
            for (const auto& x : u[c]) f[c] |= characters_of(x);
        }
        BundleOpen out{Variant::costar, f};
        if (!is_open(out)) throw Error(ErrorCode::NotASubfunctor, "image is not costar-open");
        return out;
    }

    // Covering-closed subfunctor {D_a : X_a ⊆ U_C}.
    Subfunctor psi_inverse(const BundleOpen& u) const {
        if (u.variant != Variant::costar || !is_open(u)) {
            throw Error(ErrorCode::FrameMismatch, "psi_inverse needs a costar open");
        }
        Subfunctor out(context_count());
        for (std::size_t c = 0; c < context_count(); ++c) {
            for (Mask m = u.fibers[c];; m = (m - 1) & u.fibers[c]) {
                out[c].push_back(l_class_of_mask(c, m));
                if (m == 0) break;
            }
        }
        return out;
    }

    // Smallest covering-closed subfunctor on the domain containing u.
    Subfunctor covering_closure(Subfunctor u, std::optional<std::size_t> base = std::nullopt) const {
        const Tolerance tol = tolerance();
        const std::size_t n = context_count();
        u.resize(n);
        auto in_domain = [&](std::size_t c) { return !base || poset_.leq(*base, c); };
        auto add = [&](std::size_t c, const LClass& x) {
            for (const auto& y : u[c]) {
                if (same_class(x, y, tol)) return false;
            }
            u[c].push_back(x);
            return true;
        };
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t c = 0; c < n; ++c) {
                if (!in_domain(c)) continue;
                for (std::size_t i = 0; i < u[c].size(); ++i) {
                    for (std::size_t c2 : poset_.above(c)) {
                        if (c2 == c) continue;
                        LClass img{c2, u[c][i].support, u[c][i].representative};
                        if (add(c2, img)) grew = true;
                    }
                }
                const Projection j = support_join(u[c], c);
                for (const auto& cand : candidates(c)) {
                    if (covered(cand.sweep, j) && add(c, cand.cls)) grew = true;
                }
            }
        }
        return u;
    }

    // ── Irreducible closed sets ──

    std::vector<IrreducibleClosed> irreducible_closed_sets(Variant v, std::size_t cap = kDefaultCap) const {
        std::vector<IrreducibleClosed> out;
        const auto pts = points();
        std::vector<BundleOpen> opens_of_point;  // smallest open containing each point
        std::vector<BundleClosed> closures;
        for (const auto& x : pts) {
            opens_of_point.push_back(saturate(single_point(x), v));
            closures.push_back(closure(single_point(x), v));
        }
        for_each_open(v, cap, [&](const Fibers& open) {
            const BundleClosed f{v, complement(open)};
            if (fibers_empty(f.fibers)) return;
            std::vector<std::size_t> inside;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (has_bit(f.fibers[pts[i].context], pts[i].index)) inside.push_back(i);
            }
            // M_x = largest closed subset of F missing x; F is reducible iff
            // M_x ∪ M_y = F for some x, y.
            std::vector<Fibers> maximal;
            for (std::size_t i : inside) {
                Fibers m = f.fibers;
                for (std::size_t c = 0; c < m.size(); ++c) m[c] &= ~opens_of_point[i].fibers[c];
                maximal.push_back(m);
            }
            bool reducible = false;
            for (std::size_t a = 0; a < maximal.size() && !reducible; ++a) {
                for (std::size_t b = a + 1; b < maximal.size() && !reducible; ++b) {
                    bool covers_all = true;
                    for (std::size_t c = 0; c < f.fibers.size() && covers_all; ++c) {
                        if ((maximal[a][c] | maximal[b][c]) != f.fibers[c]) covers_all = false;
                    }
                    reducible = covers_all;
                }
            }
            if (reducible) return;
            IrreducibleClosed irr{f, {}, false, false};
            for (std::size_t i : inside) {
                if (closures[i] == f) irr.generic_points.push_back(pts[i]);
            }
            irr.point_closure = irr.generic_points.size() == 1;
            irr.structural = restriction_closed(v) ? star_structure(f) : costar_structure(f);
            out.push_back(std::move(irr));
        });
        std::sort(out.begin(), out.end(),
                  [](const IrreducibleClosed& a, const IrreducibleClosed& b) { return a.set.fibers < b.set.fibers; });
        return out;
    }

    // ── Global sections ──

    // All compatible choices of one character per context, by backtracking
    // over contexts ordered by decreasing size.
    std::vector<std::vector<std::size_t>> global_sections(std::size_t max_contexts = 32) const {
        const std::size_t n = context_count();
        if (n > max_contexts) {
            throw Error(ErrorCode::TooLarge, std::to_string(n) + " contexts exceed cap " + std::to_string(max_contexts));
        }
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = n - 1 - i;
        std::vector<std::size_t> choice(n, 0);
        std::vector<char> assigned(n, 0);
        std::vector<std::vector<std::size_t>> out;
        std::function<void(std::size_t)> rec = [&](std::size_t pos) {
            if (pos == n) {
                out.push_back(choice);
                return;
            }
            const std::size_t c = order[pos];
            for (std::size_t k = 0; k < fiber_size(c); ++k) {
                bool ok = true;
                for (std::size_t d = 0; d < n && ok; ++d) {
                    if (!assigned[d] || d == c) continue;
                    if (poset_.leq(d, c)) ok = restrict_index(c, k, d) == choice[d];
                    else if (poset_.leq(c, d)) ok = restrict_index(d, choice[d], c) == k;
                }
                if (!ok) continue;
                choice[c] = k;
                assigned[c] = 1;
                rec(pos + 1);
                assigned[c] = 0;
            }
        };
        rec(0);
        std::sort(out.begin(), out.end());
        return out;
    }

    static constexpr std::size_t kDefaultCap = 1000000;

private:
    struct Candidate {
        LClass cls;
        std::vector<Projection> sweep;
    };

    // One class per element of P(C), with its sweep supports; built on first use.
    const std::vector<Candidate>& candidates(std::size_t c) const {
        auto& slot = candidates_.at(c);
        if (!slot) {
            std::vector<Candidate> out;
            for (Mask m = 0; m <= full_fiber(c); ++m) {
                LClass cls = l_class_of_mask(c, m);
                auto sweep = sweep_supports(cls);
                out.push_back({std::move(cls), std::move(sweep)});
            }
            slot = std::move(out);
        }
        return *slot;
    }

    Projection support_join(const std::vector<LClass>& u, std::size_t c) const {
        const std::size_t n = poset_.dim();
        Matrix join = Matrix::Zero(long(n), long(n));
        for (const auto& x : u) {
            if (x.context != c) throw Error(ErrorCode::NotInContext, "covering class from another context");
            join = join + x.support.matrix() - join * x.support.matrix();
        }
        return Projection(join, tolerance());
    }

    bool covered(const std::vector<Projection>& sweep, const Projection& join) const {
        return std::all_of(sweep.begin(), sweep.end(),
                           [&](const Projection& p) { return leq(p, join, tolerance()); });
    }

    Fibers down_closure(const Fibers& f) const {
        Fibers out = f;
        const std::size_t n = context_count();
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t d = 0; d < n; ++d) {
                if (d != c && poset_.leq(d, c)) out[d] |= restrict_mask(c, f[c], d);
            }
        }
        return out;
    }

    Fibers up_closure(const Fibers& f) const {
        Fibers out = f;
        const std::size_t n = context_count();
        for (std::size_t d = 0; d < n; ++d) {
            for (std::size_t c = 0; c < n; ++c) {
                if (d != c && poset_.leq(d, c)) out[c] |= lift_mask(d, f[d], c);
            }
        }
        return out;
    }

    // Down-saturated closed sets: singleton fibers and directed support.
    bool costar_structure(const BundleClosed& f) const {
        std::vector<std::size_t> support;
        for (std::size_t c = 0; c < f.fibers.size(); ++c) {
            if (f.fibers[c] == 0) continue;
            if (popcount(f.fibers[c]) != 1) return false;
            support.push_back(c);
        }
        for (std::size_t a : support) {
            for (std::size_t b : support) {
                const bool bounded = std::any_of(support.begin(), support.end(), [&](std::size_t c) {
                    return poset_.leq(a, c) && poset_.leq(b, c);
                });
                if (!bounded) return false;
            }
        }
        return true;
    }

    // Up-saturated closed sets: a unique minimal context whose fiber is a
    // singleton {λ}, and F is the closure of that point.
    bool star_structure(const BundleClosed& f) const {
        std::vector<std::size_t> minimal;
        for (std::size_t c = 0; c < f.fibers.size(); ++c) {
            if (f.fibers[c] == 0) continue;
            bool is_min = true;
            for (std::size_t d = 0; d < f.fibers.size(); ++d) {
                if (d != c && f.fibers[d] != 0 && poset_.leq(d, c)) is_min = false;
            }
            if (is_min) minimal.push_back(c);
        }
        if (minimal.size() != 1 || popcount(f.fibers[minimal[0]]) != 1) return false;
        const std::size_t c = minimal[0];
        const std::size_t k = std::size_t(__builtin_ctzll(f.fibers[c]));
        return closure(single_point({c, k}), f.variant) == f;
    }

    void validate_subfunctor(const Subfunctor& u, std::optional<std::size_t> base) const {
        const Tolerance tol = tolerance();
        const std::size_t n = context_count();
        if (u.size() != n) throw Error(ErrorCode::NotASubfunctor, "one class list per context expected");
        if (base) poset_.check_index(*base);
        auto in_domain = [&](std::size_t c) { return !base || poset_.leq(*base, c); };
        for (std::size_t c = 0; c < n; ++c) {
            if (!in_domain(c) && !u[c].empty()) {
                throw Error(ErrorCode::NotASubfunctor, "classes outside the up-set at " + poset_.name(c));
            }
            for (const auto& x : u[c]) {
                if (x.context != c) throw Error(ErrorCode::NotASubfunctor, "class filed under the wrong context");
                characters_of(x);
                for (std::size_t c2 : poset_.above(c)) {
                    const bool present = std::any_of(u[c2].begin(), u[c2].end(), [&](const LClass& y) {
                        return approx_equal(y.support, x.support, tol);
                    });
                    if (!present) {
                        throw Error(ErrorCode::NotASubfunctor,
                                    "class at " + poset_.name(c) + " missing its image at " + poset_.name(c2));
                    }
                }
            }
            if (!in_domain(c)) continue;
            const Projection j = support_join(u[c], c);
            for (const auto& cand : candidates(c)) {
                if (!covered(cand.sweep, j)) continue;
                const bool present = std::any_of(u[c].begin(), u[c].end(),
                                                 [&](const LClass& y) { return same_class(cand.cls, y, tol); });
                if (!present) {
                    throw Error(ErrorCode::NotCoveringClosed, "covered class missing at " + poset_.name(c));
                }
            }
        }
    }

    ContextPoset poset_;
    std::vector<std::size_t> offsets_;
    std::vector<std::vector<std::size_t>> restrict_;  // [c * n + d][k] for d ⊆ c
    mutable std::vector<std::optional<std::vector<Candidate>>> candidates_;
};

}  // namespace toposq
