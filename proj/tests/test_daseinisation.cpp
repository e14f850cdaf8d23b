#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "support/oracles.hpp"

using namespace toposq;

namespace {

const double kPhi = (1 + std::sqrt(5.0)) / 2;
const double kPsi = (1 - std::sqrt(5.0)) / 2;

Projection diag_proj(std::initializer_list<double> d) {
    return Projection(HermitianOperator::diagonal(std::vector<double>(d)).matrix());
}

std::size_t index_of_projection(const Context& c, std::initializer_list<double> d) {
    const auto m = c.mask_of(diag_proj(d));
    EXPECT_TRUE(m && popcount(*m) == 1);
    return std::size_t(__builtin_ctzll(*m));
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::ParseError;
}

// Random open window around part of the spectrum of a.
ScottBasic random_window(gen::Rng& rng, const HermitianOperator& a) {
    const double lo = a.min_eigenvalue() - 0.5;
    const double hi = a.max_eigenvalue() + 0.5;
    double p = gen::uniform(rng, lo, hi);
    double q = gen::uniform(rng, lo, hi);
    if (p > q) std::swap(p, q);
    if (q - p < 1e-3) q = p + 0.5;
    return {p, q};
}

}  // namespace

TEST(DasProjection, MemberIsFixed) {
    const auto c = fixtures::Cz();
    for (Mask m = 0; m <= c.full(); ++m) {
        const auto p = c.projection(m);
        EXPECT_TRUE(approx_equal(das_outer_proj(p, c), p));
        EXPECT_TRUE(approx_equal(das_inner_proj(p, c), p));
    }
}

TEST(DasProjection, PxInCz) {
    const auto c = fixtures::Cz();
    EXPECT_TRUE(approx_equal(das_outer_proj(fixtures::Px(), c).matrix(), Matrix::Identity(2, 2)));
    EXPECT_TRUE(das_inner_proj(fixtures::Px(), c).is_zero());
    EXPECT_TRUE(das_inner_proj(Projection::zero(2), c).is_zero());
    EXPECT_TRUE(das_outer_proj(Projection::zero(2), c).is_zero());
}

TEST(DasProjection, MatchesLatticeEnumeration) {
    gen::Rng rng(163);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto c = gen::context(rng, n);
        // Every third projection is built inside C so both extremes occur.
        const auto p = trial % 3 == 0 ? c.projection(Mask(gen::pick(rng, 0, c.full()))) : gen::projection(rng, n);
        EXPECT_TRUE(approx_equal(das_outer_proj(p, c), oracle::smallest_above(p, c), 1e-8));
        EXPECT_TRUE(approx_equal(das_inner_proj(p, c), oracle::largest_below(p, c), 1e-8));
    }
}

TEST(DasOperator, GoldenExample) {
    const auto c = fixtures::Cz();
    EXPECT_TRUE(approx_equal(das_outer_sa(fixtures::A(), c).matrix(), kPhi * Matrix::Identity(2, 2), 1e-12));
    EXPECT_TRUE(approx_equal(das_inner_sa(fixtures::A(), c).matrix(), kPsi * Matrix::Identity(2, 2), 1e-12));
}

TEST(DasOperator, MemberIsFixedAndTrivialContext) {
    gen::Rng rng(167);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto c = gen::context(rng, n);
        const auto a = gen::member(rng, c);
        EXPECT_TRUE(approx_equal(das_outer_sa(a, c).matrix(), a.matrix(), 1e-8));
        EXPECT_TRUE(approx_equal(das_inner_sa(a, c).matrix(), a.matrix(), 1e-8));
        const auto b = gen::hermitian(rng, n);
        const auto one = Context::trivial(n);
        EXPECT_TRUE(approx_equal(das_inner_sa(b, one).matrix(), b.min_eigenvalue() * Matrix::Identity(long(n), long(n)), 1e-8));
        EXPECT_TRUE(approx_equal(das_outer_sa(b, one).matrix(), b.max_eigenvalue() * Matrix::Identity(long(n), long(n)), 1e-8));
    }
}

TEST(DasOperator, MatchesSpectralOrderExtrema) {
    gen::Rng rng(173);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 3);
        const auto c = gen::context(rng, n);
        // Few distinct eigenvalues keep the candidate enumeration small.
        const auto a = trial % 2 ? gen::member(rng, gen::context(rng, n)) : gen::hermitian(rng, n);
        const auto hi = oracle::smallest_dominating(a, c);
        const auto lo = oracle::largest_dominated(a, c);
        ASSERT_TRUE(hi && lo);
        EXPECT_TRUE(approx_equal(das_outer_sa(a, c).matrix(), hi->matrix(), 1e-8));
        EXPECT_TRUE(approx_equal(das_inner_sa(a, c).matrix(), lo->matrix(), 1e-8));
    }
}

TEST(DasOperator, ProjectionCaseAgrees) {
    gen::Rng rng(179);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto c = gen::context(rng, n);
        const auto p = gen::projection(rng, n);
        if (p.is_zero() || approx_equal(p.matrix(), Matrix::Identity(long(n), long(n)))) continue;
        EXPECT_TRUE(approx_equal(das_outer_sa(p.op(), c).matrix(), das_outer_proj(p, c).matrix(), 1e-8));
        EXPECT_TRUE(approx_equal(das_inner_sa(p.op(), c).matrix(), das_inner_proj(p, c).matrix(), 1e-8));
    }
}

TEST(DasOperator, SandwichAndAntitonicity) {
    gen::Rng rng(181);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto c = gen::context(rng, n);
        const auto d = gen::coarsening(rng, c);
        const auto a = gen::hermitian(rng, n);
        const auto in_c = das_inner_sa(a, c), out_c = das_outer_sa(a, c);
        const auto in_d = das_inner_sa(a, d), out_d = das_outer_sa(a, d);
        EXPECT_TRUE(spectral_order_leq(in_d, in_c));
        EXPECT_TRUE(spectral_order_leq(in_c, a));
        EXPECT_TRUE(spectral_order_leq(a, out_c));
        EXPECT_TRUE(spectral_order_leq(out_c, out_d));
        EXPECT_TRUE(c.contains(in_c.matrix()));
        EXPECT_TRUE(c.contains(out_c.matrix()));
    }
}

TEST(DasMap, Examples) {
    const SpectralBundle b(fixtures::P2());
    const std::size_t l1 = index_of_projection(b.poset().context(1), {1, 0});
    const auto iv = das_map(fixtures::A(), b, {1, l1});
    EXPECT_NEAR(iv.lo, kPsi, 1e-12);
    EXPECT_NEAR(iv.hi, kPhi, 1e-12);
    const auto a = HermitianOperator::diagonal({3, 7});
    const auto member = das_map(a, b, {1, l1});
    EXPECT_NEAR(member.lo, 3, 1e-12);
    EXPECT_NEAR(member.hi, 3, 1e-12);
    const auto coarse = das_map(a, b, {0, 0});
    EXPECT_NEAR(coarse.lo, 3, 1e-12);
    EXPECT_NEAR(coarse.hi, 7, 1e-12);
    EXPECT_EQ(code_of([&] { das_map(a, b, {0, 1}); }), ErrorCode::PointNotInBundle);
}

TEST(DasMap, NarrowsUnderRefinement) {
    gen::Rng rng(191);
    for (int trial = 0; trial < 30; ++trial) {
        const SpectralBundle b(gen::poset(rng, gen::pick(rng, 2, 4), true));
        const auto a = gen::hermitian(rng, b.poset().dim());
        for (const auto& x : b.points()) {
            const auto fine = das_map(a, b, x);
            for (std::size_t d : b.poset().below(x.context)) {
                EXPECT_TRUE(das_map(a, b, b.restrict_character(x, d)).contains(fine));
            }
        }
    }
}

TEST(DasMap, MatchesAntonymousAndObservable) {
    gen::Rng rng(193);
    for (int trial = 0; trial < 50; ++trial) {
        const SpectralBundle b(gen::poset(rng, gen::pick(rng, 2, 4), trial % 2 == 0));
        const auto a = gen::hermitian(rng, b.poset().dim());
        for (const auto& x : b.points()) {
            const auto iv = das_map(a, b, x);
            EXPECT_NEAR(iv.lo, antonymous_value(a, b, x), 1e-8);
            EXPECT_NEAR(iv.hi, observable_value(a, b, x), 1e-8);
        }
    }
    const SpectralBundle p2(fixtures::P2());
    const std::size_t l1 = index_of_projection(p2.poset().context(1), {1, 0});
    EXPECT_NEAR(antonymous_value(fixtures::A(), p2, {1, l1}), kPsi, 1e-12);
    EXPECT_NEAR(observable_value(fixtures::A(), p2, {1, l1}), kPhi, 1e-12);
    EXPECT_NEAR(antonymous_value(fixtures::A(), p2, {0, 0}), kPsi, 1e-12);
    EXPECT_NEAR(observable_value(fixtures::A(), p2, {0, 0}), kPhi, 1e-12);
    const auto z = HermitianOperator::diagonal({2, -5});
    EXPECT_NEAR(antonymous_value(z, p2, {1, l1}), 2, 1e-12);
    EXPECT_NEAR(observable_value(z, p2, {1, l1}), 2, 1e-12);
}

TEST(Cov1, Examples) {
    const SpectralBundle b(fixtures::P2());
    const std::size_t l1 = index_of_projection(b.poset().context(1), {1, 0});
    const auto a = fixtures::A();
    EXPECT_EQ(elementary_prop_cov1(a, {kPsi - 1, kPhi + 1}, b).fibers, b.full_fibers());
    EXPECT_TRUE(fibers_empty(elementary_prop_cov1(a, {0, 2}, b).fibers));
    const auto z = HermitianOperator::diagonal({1, -1});
    const auto u = elementary_prop_cov1(z, {0, 2}, b);
    EXPECT_EQ(u.fibers, (Fibers{0, bit(l1)}));
    EXPECT_EQ(u.variant, Variant::costar);
    EXPECT_EQ(code_of([&] { elementary_prop_cov1(z, {2, 0}, b); }), ErrorCode::DegenerateInterval);
}

TEST(Cov2, Examples) {
    const SpectralBundle b(fixtures::P2());
    const std::size_t l1 = index_of_projection(b.poset().context(1), {1, 0});
    const auto z = HermitianOperator::diagonal({1, -1});
    EXPECT_EQ(elementary_prop_cov2(z, {0, 2}, b).fibers, (Fibers{0, bit(l1)}));
    EXPECT_EQ(elementary_prop_cov2(z, {-5, 5}, b).fibers, b.full_fibers());
    EXPECT_TRUE(fibers_empty(elementary_prop_cov2(fixtures::A(), {0, 2}, b).fibers));
    EXPECT_EQ(code_of([&] { elementary_prop_cov2(z, {1, 1}, b); }), ErrorCode::DegenerateInterval);
}

TEST(Contra, Examples) {
    const SpectralBundle b(fixtures::P2());
    const std::size_t l1 = index_of_projection(b.poset().context(1), {1, 0});
    const auto z = HermitianOperator::diagonal({1, -1});
    const auto u = elementary_prop_contra(z, {RealInterval::open(0, 2)}, b);
    EXPECT_EQ(u.fibers, (Fibers{1, bit(l1)}));
    EXPECT_EQ(u.variant, Variant::clopen_star);
    EXPECT_TRUE(b.is_open(u));
    EXPECT_EQ(elementary_prop_contra(fixtures::A(), {RealInterval::open(0, 2)}, b).fibers, b.full_fibers());
    EXPECT_TRUE(fibers_empty(elementary_prop_contra(z, {RealInterval::open(3, 4)}, b).fibers));
    EXPECT_EQ(code_of([&] { elementary_prop_contra(z, {RealInterval::open(4, 3)}, b); }),
              ErrorCode::DegenerateInterval);
}

TEST(Propositions, OpenInTheirTopologies) {
    gen::Rng rng(197);
    for (int trial = 0; trial < 50; ++trial) {
        const SpectralBundle b(gen::poset(rng, gen::pick(rng, 2, 4), trial % 2 == 0));
        const auto a = gen::hermitian(rng, b.poset().dim());
        const auto w = random_window(rng, a);
        EXPECT_TRUE(b.is_open(elementary_prop_cov1(a, w, b)));
        EXPECT_TRUE(b.is_open(elementary_prop_cov2(a, w, b)));
        EXPECT_TRUE(b.is_open(elementary_prop_contra(a, {w.as_interval()}, b)));
    }
}

TEST(Cov1Cov2, InclusionAndClosedEndpointBounds) {
    gen::Rng rng(199);
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralBundle b(gen::poset(rng, 3, trial % 2 == 0));
        // Half the operators live in a poset context so the windows bite.
        const auto a = trial % 2 ? gen::hermitian(rng, 3)
                                 : gen::member(rng, b.poset().context(gen::pick(rng, 0, b.context_count() - 1)));
        const auto w = random_window(rng, a);
        const auto one = elementary_prop_cov1(a, w, b);
        const auto two = elementary_prop_cov2(a, w, b);
        EXPECT_TRUE(fibers_subset(one.fibers, two.fibers));
        for (const auto& x : b.points()) {
            if (!has_bit(two.fibers[x.context], x.index)) continue;
            const auto iv = das_map(a, b, x);
            EXPECT_GE(iv.lo, w.p - 1e-9);
            EXPECT_LE(iv.hi, w.q + 1e-9);
        }
    }
}

TEST(Cov1Cov2, ClosedBoundsDoNotImplyCov2) {
    // a = r p with p a nontrivial projection, window (0, r): at a character
    // with λ(p) = 1 both interval ends equal r, inside [0, r], yet χ_(0,r)(a) = 0.
    const double r = 2.0;
    const SpectralBundle b(fixtures::P2());
    const std::size_t l1 = index_of_projection(b.poset().context(1), {1, 0});
    const auto a = HermitianOperator(r * diag_proj({1, 0}).matrix());
    const ScottBasic w{0, r};
    const auto iv = das_map(a, b, {1, l1});
    EXPECT_GE(iv.lo, w.p);
    EXPECT_LE(iv.hi, w.q);
    EXPECT_FALSE(has_bit(elementary_prop_cov2(a, w, b).fibers[1], l1));
    EXPECT_FALSE(has_bit(elementary_prop_cov1(a, w, b).fibers[1], l1));
}

TEST(Cov1Cov2, CoincideInFiniteDimension) {
    gen::Rng rng(211);
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralBundle b(gen::poset(rng, gen::pick(rng, 2, 4), trial % 2 == 0));
        const auto a = gen::member(rng, b.poset().context(gen::pick(rng, 0, b.context_count() - 1)));
        const auto w = random_window(rng, a);
        EXPECT_EQ(elementary_prop_cov1(a, w, b).fibers, elementary_prop_cov2(a, w, b).fibers);
    }
}

TEST(Embeddings, Examples) {
    const SpectralBundle m3(fixtures::M3_four());
    const auto one = Projection::identity(3);
    EXPECT_EQ(inf_embedding(one, m3).fibers, m3.full_fibers());
    EXPECT_EQ(sup_embedding(one, m3).fibers, m3.full_fibers());
    // e2 lies in diag but not in rot23.
    const auto e2 = diag_proj({0, 1, 0});
    const auto inf = inf_embedding(e2, m3);
    for (std::size_t c = 0; c < m3.context_count(); ++c) {
        const bool member = m3.poset().context(c).mask_of(e2).has_value();
        EXPECT_EQ(inf.fibers[c] != 0, member);
    }
}

TEST(Embeddings, MeetsAndJoinsPreserved) {
    gen::Rng rng(223);
    for (int trial = 0; trial < 50; ++trial) {
        const SpectralBundle b(gen::poset(rng, gen::pick(rng, 2, 4), trial % 2 == 0));
        const std::size_t n = b.poset().dim();
        // Pairs drawn from poset contexts may commute; random pairs mostly do not.
        auto draw = [&]() {
            if (gen::pick(rng, 0, 1)) return gen::projection(rng, n);
            const Context& c = b.poset().context(gen::pick(rng, 0, b.context_count() - 1));
            return c.projection(Mask(gen::pick(rng, 0, c.full())));
        };
        const auto p = draw();
        const auto q = draw();
        const Frame costar(b, Variant::costar);
        const Frame star(b, Variant::star);
        EXPECT_EQ(inf_embedding(range_meet(p, q), b), costar.meet(inf_embedding(p, b), inf_embedding(q, b)));
        EXPECT_EQ(sup_embedding(range_join(p, q), b), star.join(sup_embedding(p, b), sup_embedding(q, b)));
    }
}

TEST(Embeddings, DistributiveJoinFails) {
    const SpectralBundle b(fixtures::M3_projection_rich());
    const Frame costar(b, Variant::costar);
    std::vector<BundleOpen> parts;
    for (std::size_t c = 0; c < b.context_count(); ++c) {
        for (const auto& p : b.poset().context(c).minimal_projections()) {
            if (p.rank() != 1) continue;
            parts.push_back(inf_embedding(p, b));
        }
    }
    ASSERT_FALSE(parts.empty());
    const auto joined = costar.big_join(parts);
    const std::size_t trivial = b.poset().index_of(Context::trivial(3));
    EXPECT_EQ(joined.fibers[trivial], 0u);
    // The rank-1 projections join to 1 in P(A), whose image is the top.
    EXPECT_EQ(inf_embedding(Projection::identity(3), b).fibers[trivial], b.full_fiber(trivial));
    EXPECT_NE(joined, costar.top());
}

TEST(Noncontinuity, WitnessForMemberOperator) {
    const SpectralBundle b(fixtures::P2());
    const auto z = HermitianOperator::diagonal({1, -1});
    const auto w = find_noncontinuity_witness(z, b);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->fine.context, 1u);
    EXPECT_EQ(w->coarse.context, 0u);
    // The preimage of the window is costar-open but not star-open.
    Fibers pre = b.empty_fibers();
    const RealInterval win = w->window.as_interval();
    for (const auto& x : b.points()) {
        const auto iv = das_map(z, b, x);
        if (win.contains(iv.lo) && win.contains(iv.hi)) pre[x.context] |= bit(x.index);
    }
    EXPECT_TRUE(b.is_open(pre, Variant::costar));
    EXPECT_FALSE(b.is_open(pre, Variant::star));
    EXPECT_FALSE(find_noncontinuity_witness(HermitianOperator::identity(2), b).has_value());
}
