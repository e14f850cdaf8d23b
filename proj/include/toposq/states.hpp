#pragma once

// States, measures, covariant states, truth objects and pseudo-states,
// sieve/cosieve truth values and the measure-to-state reconstruction.

#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "toposq/daseinisation.hpp"

namespace toposq {

class DensityState {
public:
    explicit DensityState(const HermitianOperator& rho, Tolerance tol = {}) : rho_(rho) {
        const double tr = rho.matrix().trace().real();
        if (std::abs(tr - 1.0) > tol.slack() * double(rho.dim())) {
            throw Error(ErrorCode::NotADensity, "trace " + std::to_string(tr));
        }
        if (rho.min_eigenvalue() < -tol.slack()) {
            throw Error(ErrorCode::NotADensity, "negative eigenvalue " + std::to_string(rho.min_eigenvalue()));
        }
    }

    static DensityState from_vector(const Vector& psi, Tolerance tol = {}) {
        check_unit(psi, tol);
        return DensityState(HermitianOperator(psi * psi.adjoint()), tol);
    }

    static void check_unit(const Vector& psi, Tolerance tol) {
        if (psi.size() == 0 || std::abs(psi.norm() - 1.0) > std::max(tol.slack(), 1e-12) * 10) {
            throw Error(ErrorCode::NotUnitVector, "|psi| = " + std::to_string(psi.norm()));
        }
    }

    const HermitianOperator& rho() const noexcept { return rho_; }
    std::size_t dim() const noexcept { return rho_.dim(); }

private:
    HermitianOperator rho_;
};

inline double expectation(const DensityState& rho, const HermitianOperator& a) {
    require_same_dim(long(rho.dim()), long(a.dim()), "expectation");
    return expectation_value(rho.rho().matrix(), a.matrix());
}

inline double expectation(const DensityState& rho, const Projection& p) { return expectation(rho, p.op()); }

enum class Direction { order_preserving, order_reversing };

struct MonotoneValuation {
    std::vector<double> values;  // indexed by poset context
    Direction direction = Direction::order_preserving;

    bool is_monotone(const ContextPoset& poset, Tolerance tol = {}) const {
        for (std::size_t d = 0; d < poset.size(); ++d) {
            for (std::size_t c = 0; c < poset.size(); ++c) {
                if (!poset.leq(d, c)) continue;
                const double lo = direction == Direction::order_preserving ? values[d] : values[c];
                const double hi = direction == Direction::order_preserving ? values[c] : values[d];
                if (lo > hi + tol.slack()) return false;
            }
        }
        return true;
    }
};

// μ(U)(C) for opens of one variant.
using Valuation = std::function<double(const BundleOpen&, std::size_t)>;

inline bool is_one(double x, Tolerance tol) { return std::abs(x - 1.0) <= std::max(tol.slack(), 1e-12) * 10; }

// ── Contravariant measures ──

// μ(S)(C) = ρ(projection of S_C) on clopen subobjects.
class StateMeasure {
public:
    StateMeasure(DensityState rho, const SpectralBundle& b) : rho_(std::move(rho)), bundle_(&b) {
        require_same_dim(long(rho_.dim()), long(b.poset().dim()), "measure_from_state");
    }

    double operator()(const BundleOpen& s, std::size_t c) const {
        if (!restriction_closed(s.variant)) throw Error(ErrorCode::FrameMismatch, "measure takes star-family opens");
        return expectation(rho_, bundle_->poset().context(c).projection(s.fibers.at(c)));
    }

    MonotoneValuation valuation(const BundleOpen& s) const {
        MonotoneValuation v{{}, Direction::order_reversing};
        for (std::size_t c = 0; c < bundle_->context_count(); ++c) v.values.push_back((*this)(s, c));
        return v;
    }

private:
    DensityState rho_;
    const SpectralBundle* bundle_;
};

inline StateMeasure measure_from_state(const DensityState& rho, const SpectralBundle& b) { return {rho, b}; }

// ── Covariant states ──

// μ_ρ(U)(C) = max{ρ(p) : p ∈ P(C), X_p ⊆ U_C}.
class CovariantState {
public:
    CovariantState(DensityState rho, const SpectralBundle& b) : rho_(std::move(rho)), bundle_(&b) {
        require_same_dim(long(rho_.dim()), long(b.poset().dim()), "covariant_state_from_state");
    }

    double operator()(const BundleOpen& u, std::size_t c) const {
        if (u.variant != Variant::costar) throw Error(ErrorCode::FrameMismatch, "covariant state takes costar opens");
        const Context& ctx = bundle_->poset().context(c);
        const Mask allowed = u.fibers.at(c);
        double best = 0.0;
        for (Mask m = allowed;; m = (m - 1) & allowed) {
            best = std::max(best, expectation(rho_, ctx.projection(m)));
            if (m == 0) break;
        }
        return best;
    }

    MonotoneValuation valuation(const BundleOpen& u) const {
        MonotoneValuation v{{}, Direction::order_preserving};
        for (std::size_t c = 0; c < bundle_->context_count(); ++c) v.values.push_back((*this)(u, c));
        return v;
    }

    const DensityState& state() const noexcept { return rho_; }

private:
    DensityState rho_;
    const SpectralBundle* bundle_;
};

inline CovariantState covariant_state_from_state(const DensityState& rho, const SpectralBundle& b) {
    return {rho, b};
}

// ── Truth objects and pseudo-states ──

// T^ψ_C = {p ∈ P(C) : <ψ|p|ψ> = 1}, as character sets.
inline std::vector<std::vector<Mask>> truth_object(const Vector& psi, const SpectralBundle& b) {
    const Tolerance tol = b.tolerance();
    DensityState::check_unit(psi, tol);
    const DensityState rho = DensityState::from_vector(psi, tol);
    std::vector<std::vector<Mask>> out(b.context_count());
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        for (Mask m = 0; m <= b.full_fiber(c); ++m) {
            if (is_one(expectation(rho, b.poset().context(c).projection(m)), tol)) out[c].push_back(m);
        }
    }
    return out;
}

// w^ψ: fiber {λ : λ(δ^o(|ψ><ψ|)_C) = 1}.
inline BundleOpen pseudo_state_contra(const Vector& psi, const SpectralBundle& b) {
    DensityState::check_unit(psi, b.tolerance());
    BundleOpen out = sup_embedding(Projection::onto(psi), b);
    out.variant = Variant::clopen_star;
    return out;
}

// Covariant pseudo-state: fiber {λ : λ(δ^i(|ψ><ψ|)_C) = 1}.
inline BundleOpen pseudo_state_cov(const Vector& psi, const SpectralBundle& b) {
    DensityState::check_unit(psi, b.tolerance());
    return inf_embedding(Projection::onto(psi), b);
}

// ── Truth values ──

// {C' ⊆ base : <ψ|δ^o(p)_C'|ψ> = 1}.
inline Sieve truth_value_contra_membership(const Vector& psi, const Projection& p, const SpectralBundle& b,
                                           std::size_t base) {
    const Tolerance tol = b.tolerance();
    const DensityState rho = DensityState::from_vector(psi, tol);
    Sieve out{SieveKind::sieve, base, {}};
    for (std::size_t c : b.poset().below(base)) {
        if (is_one(expectation(rho, das_outer_proj(p, b.poset().context(c), tol)), tol)) out.members.push_back(c);
    }
    return out;
}

// {C' ⊆ base : w_C' ⊆ S_C'}.
inline Sieve truth_value_contra_inclusion(const BundleOpen& w, const BundleOpen& s, const SpectralBundle& b,
                                          std::size_t base) {
    if (!restriction_closed(w.variant) || !restriction_closed(s.variant)) {
        throw Error(ErrorCode::ModeMismatch, "inclusion mode pairs star-family subobjects");
    }
    if (!b.is_open(w) || !b.is_open(s)) throw Error(ErrorCode::ModeMismatch, "operands are not subobjects");
    Sieve out{SieveKind::sieve, base, {}};
    for (std::size_t c : b.poset().below(base)) {
        if ((w.fibers[c] & ~s.fibers[c]) == 0) out.members.push_back(c);
    }
    return out;
}

// {C' ⊆ base : μ(S)(C') = 1}.
inline Sieve truth_value_contra_measure(const Valuation& mu, const BundleOpen& s, const SpectralBundle& b,
                                        std::size_t base) {
    if (!restriction_closed(s.variant)) throw Error(ErrorCode::ModeMismatch, "measure mode needs a clopen subobject");
    Sieve out{SieveKind::sieve, base, {}};
    for (std::size_t c : b.poset().below(base)) {
        if (is_one(mu(s, c), b.tolerance())) out.members.push_back(c);
    }
    return out;
}

// {C' ⊇ base : μ(U)(C'') = 1 for all C'' ⊇ C'}.
inline Sieve truth_value_cov(const Valuation& mu, const BundleOpen& u, const SpectralBundle& b, std::size_t base) {
    if (u.variant != Variant::costar || !b.is_open(u)) {
        throw Error(ErrorCode::FrameMismatch, "covariant truth needs a costar open");
    }
    const auto& poset = b.poset();
    std::vector<char> one(poset.size(), 0);
    for (std::size_t c : poset.above(base)) one[c] = is_one(mu(u, c), b.tolerance());
    Sieve out{SieveKind::cosieve, base, {}};
    for (std::size_t c : poset.above(base)) {
        const auto up = poset.above(c);
        if (std::all_of(up.begin(), up.end(), [&](std::size_t d) { return one[d] != 0; })) out.members.push_back(c);
    }
    return out;
}

// {C' ⊇ base : w_C'' ⊆ U_C'' for all C'' ⊇ C'}.
inline Sieve truth_value_pseudo_cov(const BundleOpen& w, const BundleOpen& u, const SpectralBundle& b,
                                    std::size_t base) {
    if (w.variant != Variant::costar || u.variant != Variant::costar) {
        throw Error(ErrorCode::FrameMismatch, "covariant pseudo-state pairing needs costar opens");
    }
    const auto& poset = b.poset();
    Sieve out{SieveKind::cosieve, base, {}};
    for (std::size_t c : poset.above(base)) {
        const auto up = poset.above(c);
        if (std::all_of(up.begin(), up.end(), [&](std::size_t d) { return (w.fibers[d] & ~u.fibers[d]) == 0; })) {
            out.members.push_back(c);
        }
    }
    return out;
}

// μ⁰_ψ(U)(C) = 1 iff every C' ⊇ C containing |ψ><ψ| has the ψ-character in
// U_C'; 0 otherwise. The quantifier is vacuous where no such C' exists.
inline Valuation mu0(const Vector& psi, const SpectralBundle& b) {
    DensityState::check_unit(psi, b.tolerance());
    const Projection p = Projection::onto(psi);
    std::vector<std::optional<Mask>> xs(b.context_count());
    for (std::size_t c = 0; c < b.context_count(); ++c) xs[c] = b.poset().context(c).mask_of(p, b.tolerance());
    const SpectralBundle* bp = &b;
    return [xs, bp](const BundleOpen& u, std::size_t c) {
        for (std::size_t d : bp->poset().above(c)) {
            if (xs[d] && (*xs[d] & ~u.fibers.at(d))) return 0.0;
        }
        return 1.0;
    };
}

// ── Lemma conditions for the covariant pairing ──

// ρ(δ^i(χ_(p,q)(a))_C) = 1.
inline bool cov2_state_condition(const DensityState& rho, const HermitianOperator& a, const ScottBasic& w,
                                 const Context& c, Tolerance tol = {}) {
    const Projection chi = spectral_projection(a, w.as_interval(), tol);
    return is_one(expectation(rho, das_inner_proj(chi, c, tol)), tol);
}

// ρ gives probability 1 to δ^i(a)_C ∈ [p,q] and to δ^o(a)_C ∈ [p,q].
inline bool cov1_state_condition(const DensityState& rho, const HermitianOperator& a, const ScottBasic& w,
                                 const Context& c, Tolerance tol = {}) {
    const RealInterval closed = RealInterval::closed(w.p, w.q);
    const Projection lo = spectral_projection(das_inner_sa(a, c, tol), closed, tol);
    const Projection hi = spectral_projection(das_outer_sa(a, c, tol), closed, tol);
    return is_one(expectation(rho, lo), tol) && is_one(expectation(rho, hi), tol);
}

// Literal expectation-value reading: ρ(δ^i(a)_C), ρ(δ^o(a)_C) ∈ [p,q]. Only
// implied by cov1 truth, not equivalent to it.
inline bool cov1_expectation_condition(const DensityState& rho, const HermitianOperator& a, const ScottBasic& w,
                                       const Context& c, Tolerance tol = {}) {
    const RealInterval closed = RealInterval::closed(w.p, w.q);
    return closed.contains(expectation(rho, das_inner_sa(a, c, tol)), tol) &&
           closed.contains(expectation(rho, das_outer_sa(a, c, tol)), tol);
}

// ── Measures on clopen costar opens and reconstruction ──

// In finite dimension every costar open has clopen fibers, so the
// restriction only checks the domain.
inline Valuation restrict_measure(Valuation mu, const SpectralBundle& b) {
    const SpectralBundle* bp = &b;
    return [mu = std::move(mu), bp](const BundleOpen& u, std::size_t c) {
        if (u.variant != Variant::costar || !bp->is_open(u)) {
            throw Error(ErrorCode::FrameMismatch, "measure is defined on costar opens");
        }
        return mu(u, c);
    };
}

// m(p) = μ(U)(C) for p ∈ P(C) and U_C = X_p, then the Hermitian ρ matching m
// on every projection of every context. Only the finite fragment is used, so
// recovery is reported as Underdetermined whenever the fragment does not pin
// ρ down.
inline DensityState reconstruct_state(const Valuation& m, const SpectralBundle& b) {
    const Tolerance tol = b.tolerance();
    const double check_tol = std::max(tol.value(), 1e-12) * 1e3;
    const std::size_t n = b.poset().dim();
    struct Row {
        Matrix p;
        double value;
    };
    std::vector<Row> rows;
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        const Context& ctx = b.poset().context(c);
        std::vector<double> minimal_values(ctx.size());
        for (Mask mask = 1; mask <= ctx.full(); ++mask) {
            const Projection p = ctx.projection(mask);
            const double v = m(inf_embedding(p, b), c);
            if (popcount(mask) == 1) minimal_values[std::size_t(__builtin_ctzll(mask))] = v;
            double additive = 0.0;
            for (std::size_t k = 0; k < ctx.size(); ++k) {
                if (has_bit(mask, k)) additive += minimal_values[k];
            }
            if (std::abs(additive - v) > check_tol) {
                throw Error(ErrorCode::Inconsistent, "m is not additive at " + b.poset().name(c));
            }
            bool seen = false;
            for (const auto& r : rows) {
                if (approx_equal(r.p, p.matrix(), tol)) {
                    seen = true;
                    if (std::abs(r.value - v) > check_tol) {
                        throw Error(ErrorCode::Inconsistent, "m disagrees across contexts");
                    }
                }
            }
            if (!seen) rows.push_back({p.matrix(), v});
        }
    }
    // Unknowns: ρ_ii, then Re ρ_ij and Im ρ_ij for i < j.
    const std::size_t unknowns = n * n;
    Eigen::MatrixXd a(long(rows.size()), long(unknowns));
    Eigen::VectorXd rhs(long(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Matrix& p = rows[r].p;
        std::size_t col = 0;
        for (std::size_t i = 0; i < n; ++i) a(long(r), long(col++)) = p(long(i), long(i)).real();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const cplx pji = p(long(j), long(i));
                a(long(r), long(col++)) = 2 * pji.real();
                a(long(r), long(col++)) = -2 * pji.imag();
            }
        }
        rhs(long(r)) = rows[r].value;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-10);
    if (std::size_t(cod.rank()) < unknowns) {
        std::ostringstream os;
        os << "projections of the poset fix " << cod.rank() << " of " << unknowns << " real parameters";
        throw Error(ErrorCode::Underdetermined, os.str());
    }
    const Eigen::VectorXd x = cod.solve(rhs);
    if ((a * x - rhs).cwiseAbs().maxCoeff() > check_tol) {
        throw Error(ErrorCode::Inconsistent, "no Hermitian operator matches m");
    }
    Matrix rho = Matrix::Zero(long(n), long(n));
    std::size_t col = 0;
    for (std::size_t i = 0; i < n; ++i) rho(long(i), long(i)) = x(long(col++));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double re = x(long(col++));
            const double im = x(long(col++));
            rho(long(i), long(j)) = cplx(re, im);
            rho(long(j), long(i)) = cplx(re, -im);
        }
    }
    const HermitianOperator h(rho);
    if (h.min_eigenvalue() < -check_tol || std::abs(rho.trace().real() - 1.0) > check_tol) {
        throw Error(ErrorCode::Inconsistent, "solution is not a density matrix");
    }
    return DensityState(h, Tolerance(std::min(check_tol, 9e-4)));
}

}  // namespace toposq
