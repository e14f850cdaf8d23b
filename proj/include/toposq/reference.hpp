#pragma once

// Brute-force reference computations. Each one works from a definition by
// enumeration and avoids the code path it is compared against.

#include <optional>
#include <vector>

#include "toposq/daseinisation.hpp"

namespace toposq::reference {

// Every element of P(C), indexed by character mask.
inline std::vector<Projection> lattice(const Context& c) {
    std::vector<Projection> out;
    for (Mask m = 0; m <= c.full(); ++m) out.push_back(c.projection(m));
    return out;
}

// Least q ∈ P(C) with p ≤ q.
inline Projection smallest_above(const Projection& p, const Context& c) {
    std::optional<Projection> best;
    for (const auto& q : lattice(c)) {
        if (leq(p, q) && (!best || q.rank() < best->rank())) best = q;
    }
    return *best;
}

// Greatest q ∈ P(C) with q ≤ p.
inline Projection largest_below(const Projection& p, const Context& c) {
    std::optional<Projection> best;
    for (const auto& q : lattice(c)) {
        if (leq(q, p) && (!best || q.rank() > best->rank())) best = q;
    }
    return *best;
}

inline std::vector<double> distinct_eigenvalues(const HermitianOperator& a) {
    return eigendecompose(a).thresholds;
}

// Candidates Σ v_j q_j with every v_j taken from σ(a).
inline std::vector<std::vector<double>> step_candidates(const HermitianOperator& a, const Context& c) {
    const auto sigma = distinct_eigenvalues(a);
    std::vector<std::vector<double>> out{{}};
    for (std::size_t j = 0; j < c.size(); ++j) {
        std::vector<std::vector<double>> next;
        for (const auto& partial : out) {
            for (double v : sigma) {
                auto extended = partial;
                extended.push_back(v);
                next.push_back(extended);
            }
        }
        out = std::move(next);
    }
    return out;
}

inline HermitianOperator assemble(const Context& c, const std::vector<double>& v) {
    Matrix m = Matrix::Zero(long(c.dim()), long(c.dim()));
    for (std::size_t j = 0; j < c.size(); ++j) m += v[j] * c.minimal(j).matrix();
    return HermitianOperator(m);
}

// Spectral-order infimum of {b ∈ C_sa : a ≤_s b}; among commuting operators
// the meet is the pointwise minimum.
inline std::optional<HermitianOperator> smallest_dominating(const HermitianOperator& a, const Context& c) {
    std::optional<std::vector<double>> best;
    for (const auto& v : step_candidates(a, c)) {
        if (!spectral_order_leq(a, assemble(c, v))) continue;
        if (!best) best = v;
        for (std::size_t j = 0; j < v.size(); ++j) (*best)[j] = std::min((*best)[j], v[j]);
    }
    if (!best) return std::nullopt;
    return assemble(c, *best);
}

inline std::optional<HermitianOperator> largest_dominated(const HermitianOperator& a, const Context& c) {
    std::optional<std::vector<double>> best;
    for (const auto& v : step_candidates(a, c)) {
        if (!spectral_order_leq(assemble(c, v), a)) continue;
        if (!best) best = v;
        for (std::size_t j = 0; j < v.size(); ++j) (*best)[j] = std::max((*best)[j], v[j]);
    }
    if (!best) return std::nullopt;
    return assemble(c, *best);
}

}  // namespace toposq::reference
