#pragma once

// Small canonical instances shared by tests, the acceptance suite and the CLI.

#include <cmath>
#include <vector>

#include "toposq/context.hpp"

namespace toposq::fixtures {

inline HermitianOperator A() {
    Matrix m(2, 2);
    m << 0, 1, 1, 1;
    return HermitianOperator(m);
}
inline HermitianOperator B1() { return HermitianOperator::diagonal({-1.0, 0.0}); }
inline HermitianOperator B2() { return HermitianOperator::diagonal({-0.25, -3.0}); }

inline Context Cz() { return context_from_operators({HermitianOperator::diagonal({1.0, -1.0})}); }

inline Projection Px() {
    Matrix m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return Projection(m);
}

inline Vector psi() {
    Vector v(2);
    v << 1, 0;
    return v;
}

// {C·1, Cz}
inline ContextPoset P2() { return build_poset({Cz()}, true, {}, {"Cz"}); }

inline Vector basis_vector(std::size_t n, std::size_t i) {
    Vector v = Vector::Zero(long(n));
    v(long(i)) = 1;
    return v;
}

// Context whose minimal projections project onto the given orthogonal vectors.
inline Context context_of_rays(const std::vector<Vector>& rays) {
    std::vector<Projection> ps;
    for (const auto& r : rays) ps.push_back(Projection::onto(r));
    return Context::from_resolution(std::move(ps));
}

// {C·1, {e1, span(e2, e3)}, diag, {e1, (e2±e3)/√2}}: four contexts in M3.
inline ContextPoset M3_four() {
    const double s = 1.0 / std::sqrt(2.0);
    Vector e1 = basis_vector(3, 0), e2 = basis_vector(3, 1), e3 = basis_vector(3, 2);
    const Context diag = context_of_rays({e1, e2, e3});
    const Context rotated = context_of_rays({e1, s * (e2 + e3), s * (e2 - e3)});
    return build_poset({diag, rotated}, true, {}, {"diag", "rot23"});
}

// Maximal M3 contexts whose projections span all Hermitian 3x3 matrices: the
// standard basis plus real and complex rotations in each coordinate plane.
inline ContextPoset M3_projection_rich() {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    std::vector<Context> seeds{context_of_rays({basis_vector(3, 0), basis_vector(3, 1), basis_vector(3, 2)})};
    std::vector<std::string> names{"diag"};
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a + 1; b < 3; ++b) {
            const std::size_t c = 3 - a - b;
            const Vector ea = basis_vector(3, a), eb = basis_vector(3, b), ec = basis_vector(3, c);
            seeds.push_back(context_of_rays({s * (ea + eb), s * (ea - eb), ec}));
            seeds.push_back(context_of_rays({s * (ea + i * eb), s * (ea - i * eb), ec}));
            const std::string plane = std::to_string(a + 1) + std::to_string(b + 1);
            names.push_back("re" + plane);
            names.push_back("im" + plane);
        }
    }
    return build_poset(seeds, true, {}, names);
}

// Eighteen rays in C^4 arranged in nine orthogonal bases, each ray in exactly
// two bases; no assignment picks one ray per basis consistently.
inline std::vector<Context> cabello_contexts() {
    const int rays[9][4][4] = {
        {{0, 0, 0, 1}, {0, 0, 1, 0}, {1, 1, 0, 0}, {1, -1, 0, 0}},
        {{0, 0, 0, 1}, {0, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, -1, 0}},
        {{1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}},
        {{1, -1, 1, -1}, {1, 1, 1, 1}, {1, 0, -1, 0}, {0, 1, 0, -1}},
        {{0, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 1}, {1, 0, 0, -1}},
        {{1, -1, -1, 1}, {1, 1, 1, 1}, {1, 0, 0, -1}, {0, 1, -1, 0}},
        {{1, 1, -1, 1}, {1, 1, 1, -1}, {1, -1, 0, 0}, {0, 0, 1, 1}},
        {{1, 1, -1, 1}, {-1, 1, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, -1}},
        {{1, 1, 1, -1}, {-1, 1, 1, 1}, {1, 0, 0, 1}, {0, 1, -1, 0}},
    };
    std::vector<Context> out;
    for (const auto& basis : rays) {
        std::vector<Vector> vs;
        for (const auto& r : basis) {
            Vector v(4);
            v << r[0], r[1], r[2], r[3];
            vs.push_back(v);
        }
        out.push_back(context_of_rays(vs));
    }
    return out;
}

inline ContextPoset cabello_poset() { return build_poset(cabello_contexts(), false); }

}  // namespace toposq::fixtures
