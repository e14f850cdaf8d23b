#pragma once

// Contexts (abelian subalgebras stored as resolutions of identity) and
// finite meet-closed context posets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "toposq/operator.hpp"

namespace toposq {

using Mask = std::uint64_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }
inline Mask full_mask(std::size_t k) { return k >= 64 ? ~Mask{0} : (bit(k) - 1); }
inline bool has_bit(Mask m, std::size_t i) { return (m >> i) & 1u; }

namespace detail {

inline int key_decimals(Tolerance tol) {
    const double t = std::max(tol.value(), 1e-12);
    return std::clamp(int(std::floor(-std::log10(t))) - 2, 3, 8);
}

inline std::vector<long long> fingerprint(const Matrix& m, int decimals) {
    const double scale = std::pow(10.0, decimals);
    std::vector<long long> out;
    out.reserve(std::size_t(m.size()) * 2);
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            out.push_back(std::llround(m(i, j).real() * scale));
            out.push_back(std::llround(m(i, j).imag() * scale));
        }
    }
    return out;
}

}  // namespace detail

class Context {
public:
    static Context trivial(std::size_t n) {
        return Context({Projection::identity(n)}, Tolerance{});
    }

    // Validates orthogonality, completeness and nonzero blocks; orders the
    // projections canonically.
    static Context from_resolution(std::vector<Projection> ps, Tolerance tol = {}) {
        if (ps.empty()) throw Error(ErrorCode::InvalidContext, "empty resolution");
        const std::size_t n = ps.front().dim();
        Matrix sum = Matrix::Zero(long(n), long(n));
        for (std::size_t i = 0; i < ps.size(); ++i) {
            require_same_dim(long(ps[i].dim()), long(n), "context");
            if (ps[i].is_zero(tol)) throw Error(ErrorCode::InvalidContext, "zero block");
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                if (!orthogonal(ps[i], ps[j], tol)) {
                    throw Error(ErrorCode::InvalidContext, "blocks not mutually orthogonal");
                }
            }
            sum += ps[i].matrix();
        }
        if (!approx_equal(sum, Matrix::Identity(long(n), long(n)), tol)) {
            throw Error(ErrorCode::InvalidContext, "blocks do not sum to the identity");
        }
        if (ps.size() > 64) throw Error(ErrorCode::TooLarge, "more than 64 minimal projections");
        return Context(std::move(ps), tol);
    }

    std::size_t dim() const { return minimal_.front().dim(); }
    std::size_t size() const noexcept { return minimal_.size(); }
    const std::vector<Projection>& minimal_projections() const noexcept { return minimal_; }
    const Projection& minimal(std::size_t i) const { return minimal_.at(i); }
    const std::string& key() const noexcept { return key_; }
    Mask full() const { return full_mask(size()); }

    Projection projection(Mask mask) const {
        Matrix m = Matrix::Zero(long(dim()), long(dim()));
        for (std::size_t i = 0; i < size(); ++i) {
            if (has_bit(mask, i)) m += minimal_[i].matrix();
        }
        return Projection(m);
    }

    // Character set of p if p ∈ P(C).
    std::optional<Mask> mask_of(const Projection& p, Tolerance tol = {}) const {
        require_same_dim(long(p.dim()), long(dim()), "mask_of");
        Mask m = 0;
        for (std::size_t i = 0; i < size(); ++i) {
            if (leq(minimal_[i], p, tol)) m |= bit(i);
        }
        if (!approx_equal(projection(m), p, tol)) return std::nullopt;
        return m;
    }

    // Coefficients of a on the minimal projections if a ∈ C.
    std::optional<std::vector<double>> coefficients(const Matrix& a, Tolerance tol = {}) const {
        require_same_dim(long(a.rows()), long(dim()), "coefficients");
        std::vector<double> c(size());
        Matrix rebuilt = Matrix::Zero(long(dim()), long(dim()));
        for (std::size_t i = 0; i < size(); ++i) {
            c[i] = (minimal_[i].matrix() * a).trace().real() / double(minimal_[i].rank());
            rebuilt += c[i] * minimal_[i].matrix();
        }
        if (!approx_equal(rebuilt, a, tol)) return std::nullopt;
        return c;
    }

    bool contains(const Matrix& a, Tolerance tol = {}) const {
        return coefficients(a, tol).has_value();
    }

private:
    Context(std::vector<Projection> ps, Tolerance tol) : minimal_(std::move(ps)) {
        const int dec = detail::key_decimals(tol);
        std::vector<std::pair<std::vector<long long>, std::size_t>> fp;
        for (std::size_t i = 0; i < minimal_.size(); ++i) {
            fp.emplace_back(detail::fingerprint(minimal_[i].matrix(), dec), i);
        }
        std::sort(fp.begin(), fp.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        std::vector<Projection> ordered;
        std::ostringstream os;
        os << "n" << minimal_.front().dim();
        for (const auto& [f, i] : fp) {
            ordered.push_back(minimal_[i]);
            os << "|";
            for (std::size_t k = 0; k < f.size(); ++k) os << (k ? "," : "") << (f[k] == 0 ? 0 : f[k]);
        }
        minimal_ = std::move(ordered);
        key_ = os.str();
    }

    std::vector<Projection> minimal_;
    std::string key_;
};

inline bool contexts_equal(const Context& a, const Context& b, Tolerance tol = {}) {
    if (a.dim() != b.dim() || a.size() != b.size()) return false;
    for (const auto& p : a.minimal_projections()) {
        const bool found = std::any_of(b.minimal_projections().begin(), b.minimal_projections().end(),
                                       [&](const Projection& q) { return approx_equal(p, q, tol); });
        if (!found) return false;
    }
    return true;
}

// Joint eigenspace resolution of a commuting family; the generated context.
inline Context context_from_operators(const std::vector<HermitianOperator>& ops, std::size_t dim,
                                      Tolerance tol = {}) {
    for (const auto& a : ops) require_same_dim(long(a.dim()), long(dim), "context_from_operators");
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const double c = commutator_norm(ops[i].matrix(), ops[j].matrix());
            if (c > tol.slack()) {
                std::ostringstream os;
                os << "generators " << i << " and " << j << " do not commute (commutator norm " << c << ")";
                throw Error(ErrorCode::NonCommutingGenerators, os.str());
            }
        }
    }
    const long n = long(dim);
    std::vector<Matrix> blocks{Matrix::Identity(n, n)};
    for (const auto& a : ops) {
        std::vector<Matrix> next;
        for (const auto& v : blocks) {
            const Matrix restricted = v.adjoint() * a.matrix() * v;
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (restricted + restricted.adjoint()));
            const auto& ev = es.eigenvalues();
            long start = 0;
            while (start < ev.size()) {
                long end = start + 1;
                while (end < ev.size() && ev(end) - ev(end - 1) <= tol.value()) ++end;
                next.push_back(v * es.eigenvectors().middleCols(start, end - start));
                start = end;
            }
        }
        blocks = std::move(next);
    }
    std::vector<Projection> ps;
    for (const auto& v : blocks) ps.push_back(Projection::from_columns(v, dim));
    return Context::from_resolution(std::move(ps), tol);
}

inline Context context_from_operators(const std::vector<HermitianOperator>& ops, Tolerance tol = {}) {
    if (ops.empty()) throw Error(ErrorCode::InvalidContext, "dimension unknown for empty generator list");
    return context_from_operators(ops, ops.front().dim(), tol);
}

// D ⊆ C iff every minimal projection of D is a sum of minimal projections of C.
inline bool context_leq(const Context& d, const Context& c, Tolerance tol = {}) {
    require_same_dim(long(d.dim()), long(c.dim()), "context_leq");
    if (d.size() > c.size()) return false;
    for (const auto& p : d.minimal_projections()) {
        Matrix sum = Matrix::Zero(long(c.dim()), long(c.dim()));
        for (const auto& q : c.minimal_projections()) {
            if (max_norm(q.matrix() * p.matrix()) > tol.slack()) sum += q.matrix();
        }
        if (!approx_equal(sum, p.matrix(), tol)) return false;
    }
    return true;
}

// Connected components of the overlap graph between the two resolutions are
// exactly the minimal projections of the intersection algebra.
inline Context context_meet(const Context& a, const Context& b, Tolerance tol = {}) {
    require_same_dim(long(a.dim()), long(b.dim()), "context_meet");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    std::vector<std::size_t> parent(na + nb);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            if (max_norm(a.minimal(i).matrix() * b.minimal(j).matrix()) > tol.slack()) {
                parent[find(i)] = find(na + j);
            }
        }
    }
    std::map<std::size_t, Matrix> comps;
    for (std::size_t i = 0; i < na; ++i) {
        auto [it, fresh] = comps.try_emplace(find(i), Matrix::Zero(long(a.dim()), long(a.dim())));
        it->second += a.minimal(i).matrix();
    }
    std::vector<Projection> ps;
    for (const auto& [root, m] : comps) ps.emplace_back(m, tol);
    return Context::from_resolution(std::move(ps), tol);
}

// ── Sieves and cosieves ──

enum class SieveKind { sieve, cosieve };

struct Sieve {
    SieveKind kind = SieveKind::sieve;
    std::size_t base = 0;
    std::vector<std::size_t> members;  // sorted poset indices

    bool contains(std::size_t c) const {
        return std::binary_search(members.begin(), members.end(), c);
    }
    friend bool operator==(const Sieve&, const Sieve&) = default;
};

class ContextPoset {
public:
    std::size_t size() const noexcept { return contexts_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool include_trivial() const noexcept { return include_trivial_; }
    Tolerance tolerance() const noexcept { return tol_; }

    const Context& context(std::size_t i) const { return contexts_.at(i); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<Context>& contexts() const noexcept { return contexts_; }

    // Context i ⊆ context j.
    bool leq(std::size_t i, std::size_t j) const { return order_.at(i * size() + j) != 0; }

    std::optional<std::size_t> find(const Context& c) const {
        for (std::size_t i = 0; i < size(); ++i) {
            if (contexts_equal(contexts_[i], c, tol_)) return i;
        }
        return std::nullopt;
    }
    std::size_t index_of(const Context& c) const {
        if (auto i = find(c)) return *i;
        throw Error(ErrorCode::ContextNotInPoset, "context " + c.key());
    }
    std::optional<std::size_t> find_name(const std::string& name) const {
        for (std::size_t i = 0; i < size(); ++i) {
            if (names_[i] == name) return i;
        }
        return std::nullopt;
    }
    std::size_t index_of_name(const std::string& name) const {
        if (auto i = find_name(name)) return *i;
        throw Error(ErrorCode::ContextNotInPoset, "no context named '" + name + "'");
    }
    void check_index(std::size_t i) const {
        if (i >= size()) throw Error(ErrorCode::ContextNotInPoset, "index " + std::to_string(i));
    }

    std::vector<std::size_t> below(std::size_t c) const {
        check_index(c);
        std::vector<std::size_t> out;
        for (std::size_t d = 0; d < size(); ++d) {
            if (leq(d, c)) out.push_back(d);
        }
        return out;
    }
    std::vector<std::size_t> above(std::size_t c) const {
        check_index(c);
        std::vector<std::size_t> out;
        for (std::size_t d = 0; d < size(); ++d) {
            if (leq(c, d)) out.push_back(d);
        }
        return out;
    }

    Sieve principal_sieve(std::size_t c) const { return {SieveKind::sieve, c, below(c)}; }
    Sieve up_set(std::size_t c) const { return {SieveKind::cosieve, c, above(c)}; }
    Sieve principal_sieve(const Context& c) const { return principal_sieve(index_of(c)); }
    Sieve up_set(const Context& c) const { return up_set(index_of(c)); }

    // Covering pairs (lower, upper).
    std::vector<std::pair<std::size_t, std::size_t>> hasse_edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = 0; j < size(); ++j) {
                if (i == j || !leq(i, j)) continue;
                bool covering = true;
                for (std::size_t k = 0; k < size() && covering; ++k) {
                    if (k != i && k != j && leq(i, k) && leq(k, j)) covering = false;
                }
                if (covering) out.emplace_back(i, j);
            }
        }
        return out;
    }

    bool is_valid(const Sieve& s) const {
        if (s.base >= size() || !std::is_sorted(s.members.begin(), s.members.end())) return false;
        for (std::size_t m : s.members) {
            if (m >= size()) return false;
            const bool rel = s.kind == SieveKind::sieve ? leq(m, s.base) : leq(s.base, m);
            if (!rel) return false;
            for (std::size_t k = 0; k < size(); ++k) {
                const bool inward = s.kind == SieveKind::sieve ? leq(k, m) : leq(m, k);
                if (inward && !s.contains(k)) return false;
            }
        }
        return true;
    }

    friend ContextPoset build_poset(std::size_t dim, const std::vector<Context>& seeds, bool include_trivial,
                                    Tolerance tol, const std::vector<std::string>& names);

private:
    std::size_t dim_ = 0;
    bool include_trivial_ = false;
    Tolerance tol_;
    std::vector<Context> contexts_;
    std::vector<std::string> names_;
    std::vector<char> order_;
};

// Meet closure of the seeds, optionally with C·1, sorted by (block count, key).
// Without the flag C·1 never enters as a meet, so pairs meeting only in C·1
// have no meet in the poset.
// names[i], when present and nonempty, names seeds[i].
inline ContextPoset build_poset(std::size_t dim, const std::vector<Context>& seeds, bool include_trivial,
                                Tolerance tol = {}, const std::vector<std::string>& names = {}) {
    struct Entry {
        Context ctx;
        std::string name;
    };
    std::vector<Entry> items;
    auto add = [&](const Context& c, const std::string& name) {
        require_same_dim(long(c.dim()), long(dim), "build_poset");
        for (auto& e : items) {
            if (contexts_equal(e.ctx, c, tol)) {
                if (e.name.empty()) e.name = name;
                return false;
            }
        }
        items.push_back({c, name});
        return true;
    };
    for (std::size_t i = 0; i < seeds.size(); ++i) add(seeds[i], i < names.size() ? names[i] : "");
    if (include_trivial) add(Context::trivial(dim), "");

    bool grew = true;
    while (grew) {
        grew = false;
        const std::size_t n = items.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Context m = context_meet(items[i].ctx, items[j].ctx, tol);
                if (m.size() == 1 && !include_trivial) continue;
                if (add(m, "")) grew = true;
            }
        }
    }

    std::sort(items.begin(), items.end(), [](const Entry& a, const Entry& b) {
        if (a.ctx.size() != b.ctx.size()) return a.ctx.size() < b.ctx.size();
        return a.ctx.key() < b.ctx.key();
    });

    ContextPoset out;
    out.dim_ = dim;
    out.include_trivial_ = include_trivial;
    out.tol_ = tol;
    std::set<std::string> used;
    for (const auto& e : items) {
        if (!e.name.empty()) used.insert(e.name);
    }
    std::size_t counter = 0;
    for (const auto& e : items) {
        out.contexts_.push_back(e.ctx);
        std::string name = e.name;
        if (name.empty() && e.ctx.size() == 1 && !used.count("trivial")) name = "trivial";
        while (name.empty() || (name != e.name && used.count(name))) {
            name = "C" + std::to_string(++counter);
        }
        used.insert(name);
        out.names_.push_back(name);
    }
    const std::size_t n = out.contexts_.size();
    out.order_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out.order_[i * n + j] = context_leq(out.contexts_[i], out.contexts_[j], tol) ? 1 : 0;
        }
    }
    return out;
}

inline ContextPoset build_poset(const std::vector<Context>& seeds, bool include_trivial, Tolerance tol = {},
                                const std::vector<std::string>& names = {}) {
    if (seeds.empty()) throw Error(ErrorCode::InvalidContext, "dimension unknown for empty seed list");
    return build_poset(seeds.front().dim(), seeds, include_trivial, tol, names);
}

}  // namespace toposq
