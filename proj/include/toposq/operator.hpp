#pragma once

// Dense Hermitian linear algebra: validated operators and projections,
// tolerance-clustered spectral resolutions, spectral projections and the
// spectral order.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "toposq/error.hpp"

namespace toposq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;

class Tolerance {
public:
    Tolerance() = default;
    Tolerance(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
        if (!(v >= 0.0) || !(v < 1e-3)) {
            throw std::invalid_argument("tolerance must satisfy 0 <= tol < 1e-3");
        }
    }
    double value() const noexcept { return v_; }
    // Round-off allowance so that tol = 0 still accepts floating-point results.
    double slack() const noexcept { return v_ + 1e-12; }

private:
    double v_ = kDefaultTol;
};

inline double max_norm(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool approx_equal(const Matrix& a, const Matrix& b, Tolerance tol = {}) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_norm(a - b) <= tol.slack();
}

inline void require_same_dim(long a, long b, const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": dimensions " << a << " and " << b;
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

class HermitianOperator {
public:
    explicit HermitianOperator(const Matrix& m, Tolerance tol = {}) {
        if (m.rows() < 1 || m.rows() != m.cols()) {
            throw Error(ErrorCode::DimensionMismatch, "operator must be a nonempty square matrix");
        }
        const double asym = max_norm(m - m.adjoint());
        if (asym > tol.slack()) {
            std::ostringstream os;
            os << "max |a - a*| = " << asym;
            throw Error(ErrorCode::NotHermitian, os.str());
        }
        init(0.5 * (m + m.adjoint()));
    }

    static HermitianOperator identity(std::size_t n) {
        return HermitianOperator(Matrix::Identity(long(n), long(n)));
    }
    static HermitianOperator zero(std::size_t n) {
        return HermitianOperator(Matrix::Zero(long(n), long(n)));
    }
    static HermitianOperator diagonal(const std::vector<double>& d) {
        Matrix m = Matrix::Zero(long(d.size()), long(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) m(long(i), long(i)) = d[i];
        return HermitianOperator(m);
    }

    std::size_t dim() const noexcept { return std::size_t(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    // Ascending, unclustered.
    const Eigen::VectorXd& eigenvalues() const noexcept { return evals_; }
    const Matrix& eigenvectors() const noexcept { return evecs_; }

    double min_eigenvalue() const { return evals_(0); }
    double max_eigenvalue() const { return evals_(evals_.size() - 1); }

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
        require_same_dim(a.m_.rows(), b.m_.rows(), "operator+");
        return HermitianOperator(a.m_ + b.m_, Trusted{});
    }
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
        require_same_dim(a.m_.rows(), b.m_.rows(), "operator-");
        return HermitianOperator(a.m_ - b.m_, Trusted{});
    }
    friend HermitianOperator operator*(double s, const HermitianOperator& a) {
        return HermitianOperator(s * a.m_, Trusted{});
    }

private:
    struct Trusted {};
    HermitianOperator(const Matrix& m, Trusted) { init(0.5 * (m + m.adjoint())); }

    void init(Matrix m) {
        m_ = std::move(m);
        Eigen::SelfAdjointEigenSolver<Matrix> es(m_);
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
    }

    Matrix m_;
    Eigen::VectorXd evals_;
    Matrix evecs_;
};

class Projection {
public:
    explicit Projection(const Matrix& m, Tolerance tol = {}) : op_(m, tol) {
        const double idem = max_norm(op_.matrix() * op_.matrix() - op_.matrix());
        if (idem > tol.slack() * std::max<double>(1.0, double(op_.dim()))) {
            std::ostringstream os;
            os << "max |p^2 - p| = " << idem;
            throw Error(ErrorCode::NotAProjection, os.str());
        }
    }

    static Projection zero(std::size_t n) { return Projection(Matrix::Zero(long(n), long(n))); }
    static Projection identity(std::size_t n) {
        return Projection(Matrix::Identity(long(n), long(n)));
    }
    // Projection onto the line spanned by v (need not be normalized).
    static Projection onto(const Vector& v) {
        const double nrm = v.norm();
        if (nrm == 0.0) throw Error(ErrorCode::NotUnitVector, "zero vector");
        const Vector u = v / nrm;
        return Projection(u * u.adjoint());
    }
    // Projection onto the span of the given orthonormal columns.
    static Projection from_columns(const Matrix& cols, std::size_t n) {
        if (cols.cols() == 0) return zero(n);
        return Projection(cols * cols.adjoint());
    }

    const HermitianOperator& op() const noexcept { return op_; }
    const Matrix& matrix() const noexcept { return op_.matrix(); }
    std::size_t dim() const noexcept { return op_.dim(); }
    std::size_t rank() const { return std::size_t(std::lround(matrix().trace().real())); }
    bool is_zero(Tolerance tol = {}) const { return max_norm(matrix()) <= tol.slack(); }

    Projection complement() const {
        return Projection(Matrix::Identity(long(dim()), long(dim())) - matrix());
    }

private:
    HermitianOperator op_;
};

inline bool approx_equal(const Projection& p, const Projection& q, Tolerance tol = {}) {
    return approx_equal(p.matrix(), q.matrix(), tol);
}

// p <= q iff qp = p.
inline bool leq(const Projection& p, const Projection& q, Tolerance tol = {}) {
    require_same_dim(long(p.dim()), long(q.dim()), "leq");
    return approx_equal(q.matrix() * p.matrix(), p.matrix(), tol);
}

inline bool orthogonal(const Projection& p, const Projection& q, Tolerance tol = {}) {
    return max_norm(p.matrix() * q.matrix()) <= tol.slack();
}

inline double commutator_norm(const Matrix& a, const Matrix& b) {
    return max_norm(a * b - b * a);
}

inline bool commute(const Matrix& a, const Matrix& b, Tolerance tol = {}) {
    return commutator_norm(a, b) <= tol.slack();
}

// ── Spectral resolution ──

struct SpectralResolution {
    std::vector<double> thresholds;             // strictly increasing
    std::vector<Projection> eigenprojections;   // one per threshold
    std::vector<Projection> steps;              // steps[k] = e_{thresholds[k]}

    std::size_t size() const noexcept { return thresholds.size(); }
    std::size_t dim() const { return steps.back().dim(); }

    // e_lambda = chi_(-inf, lambda] for arbitrary lambda.
    Projection step_at(double lambda, Tolerance tol = {}) const {
        Projection out = Projection::zero(dim());
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            if (thresholds[k] <= lambda + tol.value()) out = steps[k];
        }
        return out;
    }

    HermitianOperator reconstruct() const {
        Matrix m = Matrix::Zero(long(dim()), long(dim()));
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            m += thresholds[k] * eigenprojections[k].matrix();
        }
        return HermitianOperator(m);
    }
};

inline SpectralResolution eigendecompose(const HermitianOperator& a, Tolerance tol = {}) {
    const auto& ev = a.eigenvalues();
    const auto& vecs = a.eigenvectors();
    const long n = ev.size();
    SpectralResolution res;
    Matrix cumulative = Matrix::Zero(n, n);
    long start = 0;
    while (start < n) {
        long end = start + 1;
        while (end < n && ev(end) - ev(end - 1) <= tol.value()) ++end;
        double mean = 0.0;
        Matrix proj = Matrix::Zero(n, n);
        for (long i = start; i < end; ++i) {
            mean += ev(i);
            proj += vecs.col(i) * vecs.col(i).adjoint();
        }
        mean /= double(end - start);
        cumulative += proj;
        res.thresholds.push_back(mean);
        res.eigenprojections.emplace_back(proj, tol);
        res.steps.emplace_back(cumulative, tol);
        start = end;
    }
    return res;
}

inline HermitianOperator functional_calculus(const HermitianOperator& a,
                                             const std::function<double(double)>& f,
                                             Tolerance tol = {}) {
    const auto res = eigendecompose(a, tol);
    Matrix m = Matrix::Zero(long(a.dim()), long(a.dim()));
    for (std::size_t k = 0; k < res.size(); ++k) m += f(res.thresholds[k]) * res.eigenprojections[k].matrix();
    return HermitianOperator(m);
}

// ── Real intervals and spectral projections ──

struct RealInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = true;
    bool hi_open = true;

    static RealInterval open(double lo, double hi) { return {lo, hi, true, true}; }
    static RealInterval closed(double lo, double hi) { return {lo, hi, false, false}; }
    static RealInterval everything() { return {}; }

    void validate() const {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
            std::ostringstream os;
            os << "interval with lower " << lo << " > upper " << hi;
            throw Error(ErrorCode::DegenerateInterval, os.str());
        }
    }

    bool contains(double x, Tolerance tol = {}) const {
        const double t = tol.value();
        const bool above = std::isinf(lo) && lo < 0 ? true : (lo_open ? x > lo + t : x >= lo - t);
        const bool below = std::isinf(hi) && hi > 0 ? true : (hi_open ? x < hi - t : x <= hi + t);
        return above && below;
    }
};

using IntervalUnion = std::vector<RealInterval>;

inline Projection spectral_projection(const HermitianOperator& a, const IntervalUnion& delta,
                                      Tolerance tol = {}) {
    for (const auto& iv : delta) iv.validate();
    const auto res = eigendecompose(a, tol);
    Matrix m = Matrix::Zero(long(a.dim()), long(a.dim()));
    for (std::size_t k = 0; k < res.size(); ++k) {
        const double l = res.thresholds[k];
        const bool in = std::any_of(delta.begin(), delta.end(),
                                    [&](const RealInterval& iv) { return iv.contains(l, tol); });
        if (in) m += res.eigenprojections[k].matrix();
    }
    return Projection(m, tol);
}

inline Projection spectral_projection(const HermitianOperator& a, const RealInterval& delta,
                                      Tolerance tol = {}) {
    return spectral_projection(a, IntervalUnion{delta}, tol);
}

// ── Orders ──

inline bool loewner_leq(const HermitianOperator& a, const HermitianOperator& b, Tolerance tol = {}) {
    require_same_dim(long(a.dim()), long(b.dim()), "loewner_leq");
    return (b - a).min_eigenvalue() >= -tol.slack();
}

// a <=_s b iff e^a_l >= e^b_l for every l; the families are constant between
// thresholds so the merged threshold set suffices.
inline bool spectral_order_leq(const HermitianOperator& a, const HermitianOperator& b,
                               Tolerance tol = {}) {
    require_same_dim(long(a.dim()), long(b.dim()), "spectral_order_leq");
    const auto ra = eigendecompose(a, tol);
    const auto rb = eigendecompose(b, tol);
    std::vector<double> grid = ra.thresholds;
    grid.insert(grid.end(), rb.thresholds.begin(), rb.thresholds.end());
    for (double l : grid) {
        if (!leq(rb.step_at(l, tol), ra.step_at(l, tol), tol)) return false;
    }
    return true;
}

// ── Projection lattice operations ──

struct LatticePair {
    Projection meet;
    Projection join;
};

inline LatticePair commuting_lattice_ops(const Projection& p, const Projection& q, Tolerance tol = {}) {
    require_same_dim(long(p.dim()), long(q.dim()), "commuting_lattice_ops");
    const double c = commutator_norm(p.matrix(), q.matrix());
    if (c > tol.slack()) {
        std::ostringstream os;
        os << "commutator norm " << c;
        throw Error(ErrorCode::NonCommuting, os.str());
    }
    const Matrix pq = 0.5 * (p.matrix() * q.matrix() + q.matrix() * p.matrix());
    return {Projection(pq, tol), Projection(p.matrix() + q.matrix() - pq, tol)};
}

// Projection onto the eigenvectors of a whose eigenvalue satisfies pred.
inline Projection eigenspace_projection(const HermitianOperator& a,
                                        const std::function<bool(double)>& pred) {
    const long n = long(a.dim());
    Matrix m = Matrix::Zero(n, n);
    for (long i = 0; i < n; ++i) {
        if (pred(a.eigenvalues()(i))) m += a.eigenvectors().col(i) * a.eigenvectors().col(i).adjoint();
    }
    return Projection(m);
}

inline Projection support_of_positive_part(const HermitianOperator& a, Tolerance tol = {}) {
    const double t = tol.value();
    return eigenspace_projection(a, [t](double l) { return l > t; });
}

// Range intersection for arbitrary projections: kernel of (1-p) + (1-q).
inline Projection range_meet(const Projection& p, const Projection& q, Tolerance tol = {}) {
    require_same_dim(long(p.dim()), long(q.dim()), "range_meet");
    const long n = long(p.dim());
    const Matrix id = Matrix::Identity(n, n);
    const HermitianOperator s((id - p.matrix()) + (id - q.matrix()));
    const double t = tol.slack();
    return eigenspace_projection(s, [t](double l) { return l <= t; });
}

inline Projection range_join(const Projection& p, const Projection& q, Tolerance tol = {}) {
    return range_meet(p.complement(), q.complement(), tol).complement();
}

inline double expectation_value(const Matrix& rho, const Matrix& a) {
    return (rho * a).trace().real();
}

}  // namespace toposq
