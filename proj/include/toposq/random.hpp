#pragma once

// Seeded generators for randomized property checks.

#include <algorithm>
#include <random>
#include <vector>

#include "toposq/context.hpp"

namespace toposq::gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Matrix gaussian(Rng& rng, std::size_t n, std::size_t m) {
    std::normal_distribution<double> g;
    Matrix out(static_cast<long>(n), static_cast<long>(m));
    for (long i = 0; i < out.rows(); ++i) {
        for (long j = 0; j < out.cols(); ++j) out(i, j) = cplx(g(rng), g(rng));
    }
    return out;
}

inline Matrix unitary(Rng& rng, std::size_t n) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
    return qr.householderQ() * Matrix::Identity(long(n), long(n));
}

inline HermitianOperator hermitian(Rng& rng, std::size_t n) {
    const Matrix g = gaussian(rng, n, n);
    return HermitianOperator(0.5 * (g + g.adjoint()));
}

inline Vector unit_vector(Rng& rng, std::size_t n) {
    const Matrix g = gaussian(rng, n, 1);
    return g.col(0) / g.col(0).norm();
}

inline Projection projection(Rng& rng, std::size_t n, std::size_t rank) {
    const Matrix u = unitary(rng, n);
    return Projection::from_columns(u.leftCols(long(rank)), n);
}

inline Projection projection(Rng& rng, std::size_t n) { return projection(rng, n, pick(rng, 0, n)); }

// Positive unit-trace matrix of full rank.
inline HermitianOperator density(Rng& rng, std::size_t n) {
    const Matrix g = gaussian(rng, n, n);
    const Matrix r = g * g.adjoint();
    return HermitianOperator(r / r.trace().real());
}

// Groups the columns of a unitary into `blocks` nonempty blocks.
inline Context context_from_unitary(Rng& rng, const Matrix& u, std::size_t blocks) {
    const std::size_t n = std::size_t(u.cols());
    std::vector<std::size_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = i < blocks ? i : pick(rng, 0, blocks - 1);
    std::shuffle(label.begin(), label.end(), rng);
    std::vector<Projection> ps;
    for (std::size_t b = 0; b < blocks; ++b) {
        Matrix m = Matrix::Zero(long(n), long(n));
        for (std::size_t i = 0; i < n; ++i) {
            if (label[i] == b) m += u.col(long(i)) * u.col(long(i)).adjoint();
        }
        ps.emplace_back(m);
    }
    return Context::from_resolution(std::move(ps));
}

inline Context context(Rng& rng, std::size_t n) { return context_from_unitary(rng, unitary(rng, n), pick(rng, 1, n)); }

inline Context maximal_context(Rng& rng, std::size_t n) { return context_from_unitary(rng, unitary(rng, n), n); }

// Coarsening of c: its minimal projections merged into random groups.
inline Context coarsening(Rng& rng, const Context& c) {
    const std::size_t k = c.size();
    const std::size_t groups = pick(rng, 1, k);
    std::vector<std::size_t> label(k);
    for (std::size_t i = 0; i < k; ++i) label[i] = i < groups ? i : pick(rng, 0, groups - 1);
    std::shuffle(label.begin(), label.end(), rng);
    std::vector<Projection> ps;
    for (std::size_t g = 0; g < groups; ++g) {
        Matrix m = Matrix::Zero(long(c.dim()), long(c.dim()));
        for (std::size_t i = 0; i < k; ++i) {
            if (label[i] == g) m += c.minimal(i).matrix();
        }
        ps.emplace_back(m);
    }
    return Context::from_resolution(std::move(ps));
}

// A few maximal contexts plus coarsenings of them, closed under meets.
inline ContextPoset poset(Rng& rng, std::size_t n, bool include_trivial, std::size_t max_seeds = 3) {
    std::vector<Context> seeds;
    const std::size_t maximal = pick(rng, 1, std::max<std::size_t>(1, max_seeds - 1));
    for (std::size_t i = 0; i < maximal; ++i) {
        seeds.push_back(maximal_context(rng, n));
        if (seeds.size() < max_seeds && pick(rng, 0, 1) == 1) seeds.push_back(coarsening(rng, seeds.back()));
    }
    return build_poset(n, seeds, include_trivial);
}

// Hermitian operator lying in context c with random coefficients.
inline HermitianOperator member(Rng& rng, const Context& c) {
    Matrix m = Matrix::Zero(long(c.dim()), long(c.dim()));
    for (const auto& p : c.minimal_projections()) m += uniform(rng, -2.0, 2.0) * p.matrix();
    return HermitianOperator(m);
}

}  // namespace toposq::gen
