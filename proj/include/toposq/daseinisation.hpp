#pragma once

// Inner and outer daseinisation of projections and self-adjoint operators,
// the interval-valued daseinisation map, elementary propositions and the
// antonymous/observable values.

#include <optional>
#include <sstream>
#include <vector>

#include "toposq/bundle.hpp"

namespace toposq {

struct ClosedInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(const ClosedInterval& inner, Tolerance tol = {}) const {
        return lo <= inner.lo + tol.slack() && inner.hi <= hi + tol.slack();
    }
};

// Scott-open window (p,q)_S: intervals [r,s] with p < r ≤ s < q.
struct ScottBasic {
    double p = 0.0;
    double q = 0.0;
    void validate() const {
        if (!(p < q)) {
            std::ostringstream os;
            os << "window (" << p << "," << q << ") needs p < q";
            throw Error(ErrorCode::DegenerateInterval, os.str());
        }
    }
    RealInterval as_interval() const { return RealInterval::open(p, q); }
};

// ── Projections ──

// Characters of C whose minimal projection overlaps p.
inline Mask das_outer_mask(const Projection& p, const Context& c, Tolerance tol = {}) {
    require_same_dim(long(p.dim()), long(c.dim()), "das_outer");
    Mask m = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (max_norm(c.minimal(i).matrix() * p.matrix()) > tol.slack()) m |= bit(i);
    }
    return m;
}

// Characters of C whose minimal projection lies below p.
inline Mask das_inner_mask(const Projection& p, const Context& c, Tolerance tol = {}) {
    require_same_dim(long(p.dim()), long(c.dim()), "das_inner");
    Mask m = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (leq(c.minimal(i), p, tol)) m |= bit(i);
    }
    return m;
}

inline Projection das_outer_proj(const Projection& p, const Context& c, Tolerance tol = {}) {
    return c.projection(das_outer_mask(p, c, tol));
}

inline Projection das_inner_proj(const Projection& p, const Context& c, Tolerance tol = {}) {
    return c.projection(das_inner_mask(p, c, tol));
}

// ── Self-adjoint operators ──

// λ_j(δ^o(a)_C): the least threshold whose inner-daseinised step contains q_j.
inline std::vector<double> outer_values(const HermitianOperator& a, const Context& c, Tolerance tol = {}) {
    const auto res = eigendecompose(a, tol);
    std::vector<double> val(c.size(), res.thresholds.back());
    std::vector<char> set(c.size(), 0);
    for (std::size_t k = 0; k < res.size(); ++k) {
        const Mask f = das_inner_mask(res.steps[k], c, tol);
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (!set[j] && has_bit(f, j)) {
                val[j] = res.thresholds[k];
                set[j] = 1;
            }
        }
    }
    return val;
}

// λ_j(δ^i(a)_C): the least threshold whose outer-daseinised step contains q_j.
inline std::vector<double> inner_values(const HermitianOperator& a, const Context& c, Tolerance tol = {}) {
    const auto res = eigendecompose(a, tol);
    std::vector<double> val(c.size(), res.thresholds.back());
    std::vector<char> set(c.size(), 0);
    for (std::size_t k = 0; k < res.size(); ++k) {
        const Mask g = das_outer_mask(res.steps[k], c, tol);
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (!set[j] && has_bit(g, j)) {
                val[j] = res.thresholds[k];
                set[j] = 1;
            }
        }
    }
    return val;
}

inline HermitianOperator operator_from_values(const Context& c, const std::vector<double>& values) {
    Matrix m = Matrix::Zero(long(c.dim()), long(c.dim()));
    for (std::size_t j = 0; j < c.size(); ++j) m += values[j] * c.minimal(j).matrix();
    return HermitianOperator(m);
}

inline HermitianOperator das_outer_sa(const HermitianOperator& a, const Context& c, Tolerance tol = {}) {
    require_same_dim(long(a.dim()), long(c.dim()), "das_outer_sa");
    return operator_from_values(c, outer_values(a, c, tol));
}

inline HermitianOperator das_inner_sa(const HermitianOperator& a, const Context& c, Tolerance tol = {}) {
    require_same_dim(long(a.dim()), long(c.dim()), "das_inner_sa");
    return operator_from_values(c, inner_values(a, c, tol));
}

inline ClosedInterval das_map(const HermitianOperator& a, const SpectralBundle& b, Character x) {
    b.check_point(x);
    const Context& c = b.poset().context(x.context);
    return {inner_values(a, c, b.tolerance())[x.index], outer_values(a, c, b.tolerance())[x.index]};
}

// ── Antonymous and observable values ──
// Computed from the spectral family of a and the minimal projection q of the
// point, without daseinising: the filter of the point is generated by q, so
// 1 - e_r lies above the filter iff q e_r = 0, and e_r does iff q ≤ e_r.

inline double antonymous_value(const HermitianOperator& a, const SpectralBundle& b, Character x) {
    b.check_point(x);
    const Tolerance tol = b.tolerance();
    const Projection& q = b.poset().context(x.context).minimal(x.index);
    const auto res = eigendecompose(a, tol);
    for (std::size_t k = 0; k < res.size(); ++k) {
        if (!orthogonal(q, res.steps[k], tol)) return res.thresholds[k];
    }
    return res.thresholds.back();
}

inline double observable_value(const HermitianOperator& a, const SpectralBundle& b, Character x) {
    b.check_point(x);
    const Tolerance tol = b.tolerance();
    const Projection& q = b.poset().context(x.context).minimal(x.index);
    const auto res = eigendecompose(a, tol);
    for (std::size_t k = 0; k < res.size(); ++k) {
        if (leq(q, res.steps[k], tol)) return res.thresholds[k];
    }
    return res.thresholds.back();
}

// ── Elementary propositions ──

// [a ∈ (p,q)]₁: points whose daseinisation interval lies inside the window.
inline BundleOpen elementary_prop_cov1(const HermitianOperator& a, const ScottBasic& w, const SpectralBundle& b) {
    w.validate();
    const Tolerance tol = b.tolerance();
    const RealInterval win = w.as_interval();
    BundleOpen out = b.bottom(Variant::costar);
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        const Context& ctx = b.poset().context(c);
        const auto lo = inner_values(a, ctx, tol);
        const auto hi = outer_values(a, ctx, tol);
        for (std::size_t j = 0; j < ctx.size(); ++j) {
            if (win.contains(lo[j], tol) && win.contains(hi[j], tol)) out.fibers[c] |= bit(j);
        }
    }
    return out;
}

// [a ∈ (p,q)]₂: support of the inner daseinisation of χ_(p,q)(a).
inline BundleOpen elementary_prop_cov2(const HermitianOperator& a, const ScottBasic& w, const SpectralBundle& b) {
    w.validate();
    const Tolerance tol = b.tolerance();
    const Projection chi = spectral_projection(a, w.as_interval(), tol);
    BundleOpen out = b.bottom(Variant::costar);
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        out.fibers[c] = das_inner_mask(chi, b.poset().context(c), tol);
    }
    return out;
}

inline BundleOpen elementary_prop_contra(const HermitianOperator& a, const IntervalUnion& delta,
                                         const SpectralBundle& b) {
    const Tolerance tol = b.tolerance();
    const Projection chi = spectral_projection(a, delta, tol);
    BundleOpen out = b.bottom(Variant::clopen_star);
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        out.fibers[c] = das_outer_mask(chi, b.poset().context(c), tol);
    }
    return out;
}

// ── Embeddings of P(A) ──

inline BundleOpen inf_embedding(const Projection& p, const SpectralBundle& b) {
    BundleOpen out = b.bottom(Variant::costar);
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        out.fibers[c] = das_inner_mask(p, b.poset().context(c), b.tolerance());
    }
    return out;
}

inline BundleOpen sup_embedding(const Projection& p, const SpectralBundle& b) {
    BundleOpen out = b.bottom(Variant::star);
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        out.fibers[c] = das_outer_mask(p, b.poset().context(c), b.tolerance());
    }
    return out;
}

// ── Non-continuity witness for the star topology ──

// A point whose interval fits a window while its restriction's interval does
// not: the preimage of that Scott open is not restriction-closed.
struct NoncontinuityWitness {
    Character fine;
    Character coarse;
    ScottBasic window;
};

inline std::optional<NoncontinuityWitness> find_noncontinuity_witness(const HermitianOperator& a,
                                                                      const SpectralBundle& b) {
    const Tolerance tol = b.tolerance();
    for (const auto& x : b.points()) {
        const ClosedInterval fine = das_map(a, b, x);
        for (std::size_t d : b.poset().below(x.context)) {
            if (d == x.context) continue;
            const Character y = b.restrict_character(x, d);
            const ClosedInterval coarse = das_map(a, b, y);
            const double gap = std::max(fine.lo - coarse.lo, coarse.hi - fine.hi);
            if (gap <= tol.slack()) continue;
            const double eps = gap / 2;
            return NoncontinuityWitness{x, y, {fine.lo - eps, fine.hi + eps}};
        }
    }
    return std::nullopt;
}

}  // namespace toposq
