#include <gtest/gtest.h>

#include <functional>

#include "support/oracles.hpp"

using namespace toposq;

namespace {

Context context_of(std::initializer_list<double> d) {
    return context_from_operators({HermitianOperator::diagonal(std::vector<double>(d))});
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

// Every subset of the poset, as a sorted index list.
std::vector<std::vector<std::size_t>> all_subsets(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    for (Mask m = 0; m < bit(n); ++m) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i) {
            if (has_bit(m, i)) s.push_back(i);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(ContextFromOperators, DiagonalGivesCz) {
    const auto c = fixtures::Cz();
    ASSERT_EQ(c.size(), 2u);
    EXPECT_TRUE(c.mask_of(Projection(HermitianOperator::diagonal({1, 0}).matrix())).has_value());
    EXPECT_TRUE(c.mask_of(Projection(HermitianOperator::diagonal({0, 1}).matrix())).has_value());
}

TEST(ContextFromOperators, EmptyListIsTrivial) {
    const auto c = context_from_operators({}, 3);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_TRUE(approx_equal(c.minimal(0).matrix(), Matrix::Identity(3, 3)));
    EXPECT_TRUE(contexts_equal(c, Context::trivial(3)));
}

TEST(ContextFromOperators, GoldenOperatorEigenprojections) {
    const auto a = fixtures::A();
    const auto c = context_from_operators({a});
    const auto res = eigendecompose(a);
    ASSERT_EQ(c.size(), 2u);
    for (const auto& p : res.eigenprojections) EXPECT_TRUE(c.mask_of(p).has_value());
}

TEST(ContextFromOperators, NonCommutingGeneratorsReported) {
    try {
        context_from_operators({fixtures::A(), HermitianOperator::diagonal({1, -1})});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonCommutingGenerators);
        EXPECT_NE(std::string(e.what()).find("0 and 1"), std::string::npos);
    }
}

TEST(ContextFromOperators, JointRefinement) {
    const auto c = context_from_operators({HermitianOperator::diagonal({1, 1, 2}), HermitianOperator::diagonal({0, 5, 5})});
    EXPECT_EQ(c.size(), 3u);
}

TEST(ContextFromOperators, FunctionalCalculusSameKey) {
    gen::Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto a = gen::member(rng, gen::context(rng, n));
        const auto sigma = eigendecompose(a).thresholds;
        bool spaced = true;
        for (std::size_t k = 0; k + 1 < sigma.size(); ++k) spaced = spaced && sigma[k + 1] - sigma[k] > 1e-3;
        // x ↦ x³ + 2x is injective, so the eigenspaces coincide.
        const auto b = functional_calculus(a, [](double x) { return x * x * x + 2 * x; });
        if (!spaced) continue;
        EXPECT_EQ(context_from_operators({a}).key(), context_from_operators({b}).key());
    }
}

TEST(ContextLeq, Examples) {
    const auto cz = fixtures::Cz();
    const auto ca = context_from_operators({fixtures::A()});
    EXPECT_TRUE(context_leq(Context::trivial(2), cz));
    EXPECT_TRUE(context_leq(Context::trivial(2), ca));
    EXPECT_FALSE(context_leq(cz, ca));
    EXPECT_TRUE(context_leq(cz, cz));
    EXPECT_TRUE(context_leq(context_of({1, 1, 2}), context_of({1, 2, 3})));
    EXPECT_FALSE(context_leq(context_of({1, 2, 3}), context_of({1, 1, 2})));
    EXPECT_EQ(code_of([&] { context_leq(cz, Context::trivial(3)); }), ErrorCode::DimensionMismatch);
}

TEST(ContextLeq, AgreesWithSpanMembership) {
    gen::Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto c = gen::context(rng, n);
        // Mix related and unrelated pairs.
        const auto d = trial % 2 ? gen::coarsening(rng, c) : gen::context(rng, n);
        EXPECT_EQ(context_leq(d, c), oracle::in_span(d, c));
        EXPECT_EQ(context_leq(c, d), oracle::in_span(c, d));
    }
}

TEST(ContextMeet, Examples) {
    const auto cz = fixtures::Cz();
    const auto ca = context_from_operators({fixtures::A()});
    EXPECT_TRUE(contexts_equal(context_meet(cz, cz), cz));
    EXPECT_TRUE(contexts_equal(context_meet(cz, ca), Context::trivial(2)));
    EXPECT_TRUE(contexts_equal(context_meet(context_of({1, 2, 3}), context_of({1, 1, 2})), context_of({1, 1, 2})));
}

TEST(ContextMeet, IsGreatestLowerBound) {
    gen::Rng rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 4);
        const auto base = gen::maximal_context(rng, n);
        const auto a = gen::coarsening(rng, base);
        const auto b = trial % 3 ? gen::coarsening(rng, base) : gen::context(rng, n);
        const auto m = context_meet(a, b);
        EXPECT_TRUE(context_leq(m, a));
        EXPECT_TRUE(context_leq(m, b));
        // Any common coarsening of a lies below the meet.
        const auto d = gen::coarsening(rng, a);
        if (context_leq(d, b)) {
            EXPECT_TRUE(context_leq(d, m));
        }
    }
}

TEST(BuildPoset, SingletonClosure) {
    const auto p = fixtures::P2();
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.context(0).size(), 1u);
    EXPECT_EQ(p.name(0), "trivial");
    EXPECT_EQ(p.name(1), "Cz");
    EXPECT_TRUE(p.leq(0, 1));
    EXPECT_FALSE(p.leq(1, 0));
    EXPECT_EQ(p.hasse_edges().size(), 1u);
}

TEST(BuildPoset, TwoM2ContextsMeetAtTrivial) {
    const auto p = build_poset({fixtures::Cz(), context_from_operators({fixtures::A()})}, true);
    EXPECT_EQ(p.size(), 3u);
    const auto q = build_poset({fixtures::Cz(), context_from_operators({fixtures::A()})}, false);
    EXPECT_EQ(q.size(), 2u);
    EXPECT_FALSE(q.find(Context::trivial(2)).has_value());
    EXPECT_FALSE(q.leq(0, 1) || q.leq(1, 0));
}

TEST(BuildPoset, SharedProjectionMeetIncluded) {
    const auto p = fixtures::M3_four();
    EXPECT_EQ(p.size(), 4u);
    const auto shared = Context::from_resolution({Projection(HermitianOperator::diagonal({1, 0, 0}).matrix()),
                                                  Projection(HermitianOperator::diagonal({0, 1, 1}).matrix())});
    ASSERT_TRUE(p.find(shared).has_value());
    EXPECT_EQ(p.context(*p.find(shared)).size(), 2u);
}

TEST(BuildPoset, MeetClosedAndOrderConsistent) {
    gen::Rng rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = gen::poset(rng, gen::pick(rng, 2, 4), trial % 2 == 0, 4);
        for (std::size_t i = 0; i < p.size(); ++i) {
            EXPECT_TRUE(p.leq(i, i));
            for (std::size_t j = 0; j < p.size(); ++j) {
                const auto m = context_meet(p.context(i), p.context(j));
                EXPECT_TRUE(p.find(m).has_value() || (m.size() == 1 && !p.include_trivial()));
                EXPECT_EQ(p.leq(i, j), context_leq(p.context(i), p.context(j)));
                if (i != j) {
                    EXPECT_FALSE(p.leq(i, j) && p.leq(j, i));
                }
                for (std::size_t k = 0; k < p.size(); ++k) {
                    if (p.leq(i, j) && p.leq(j, k)) {
                        EXPECT_TRUE(p.leq(i, k));
                    }
                }
                // The sort order is a linear extension of inclusion.
                if (p.leq(i, j)) {
                    EXPECT_LE(i, j);
                }
            }
            if (p.include_trivial()) {
                EXPECT_TRUE(p.leq(0, i));
            }
        }
    }
}

TEST(BuildPoset, Deterministic) {
    const auto a = fixtures::M3_projection_rich();
    const auto b = fixtures::M3_projection_rich();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.context(i).key(), b.context(i).key());
        EXPECT_EQ(a.name(i), b.name(i));
    }
}

TEST(Sieves, Examples) {
    const auto p = fixtures::P2();
    EXPECT_EQ(p.principal_sieve(0).members, (std::vector<std::size_t>{0}));
    EXPECT_EQ(p.principal_sieve(1).members, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(p.up_set(0).members, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(p.up_set(fixtures::Cz()).members, (std::vector<std::size_t>{1}));
    EXPECT_EQ(code_of([&] { p.principal_sieve(7); }), ErrorCode::ContextNotInPoset);
    EXPECT_EQ(code_of([&] { p.up_set(context_from_operators({fixtures::A()})); }), ErrorCode::ContextNotInPoset);
}

TEST(Sieves, ExactlyTheClosedSubsets) {
    gen::Rng rng(59);
    std::vector<ContextPoset> posets{fixtures::P2(), fixtures::M3_four()};
    for (int i = 0; i < 10; ++i) posets.push_back(gen::poset(rng, gen::pick(rng, 2, 4), i % 2 == 0));
    for (const auto& p : posets) {
        if (p.size() > 6) continue;
        for (std::size_t c = 0; c < p.size(); ++c) {
            for (const auto& s : all_subsets(p.size())) {
                bool down = true, up = true;
                for (std::size_t m : s) {
                    down = down && p.leq(m, c);
                    up = up && p.leq(c, m);
                    for (std::size_t k = 0; k < p.size(); ++k) {
                        const bool in = std::binary_search(s.begin(), s.end(), k);
                        if (p.leq(k, m) && !in) down = false;
                        if (p.leq(m, k) && !in) up = false;
                    }
                }
                EXPECT_EQ(p.is_valid(Sieve{SieveKind::sieve, c, s}), down);
                EXPECT_EQ(p.is_valid(Sieve{SieveKind::cosieve, c, s}), up);
            }
            EXPECT_TRUE(p.is_valid(p.principal_sieve(c)));
            EXPECT_TRUE(p.is_valid(p.up_set(c)));
        }
    }
}

TEST(Context, CoefficientsAndMembership) {
    const auto c = context_of({1, 2, 3});
    EXPECT_TRUE(c.contains(HermitianOperator::diagonal({5, -1, 0}).matrix()));
    Matrix off = Matrix::Zero(3, 3);
    off(0, 1) = off(1, 0) = 1;
    EXPECT_FALSE(c.contains(off));
    EXPECT_EQ(code_of([] { Context::from_resolution({Projection(HermitianOperator::diagonal({1, 0}).matrix())}); }),
              ErrorCode::InvalidContext);
}
