#include "pairkern/gvt.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace pairkern;
using testing::rel_error;

TEST_CASE("gvt_cost examples") {
    const auto c = gvt_cost(3, 2, 2, 4, 3, 2);
    CHECK(c.variant1 == 17);
    CHECK(c.variant2 == 14);
    CHECK(c.minimum() == 14);
    CHECK(gvt_cost(0, 0, 0, 0, 0, 0) == GvtCost{ 0, 0 });
    for (std::uint64_t n : { 1u, 10u, 1000u }) {
        for (std::uint64_t s : { 1u, 7u, 50u }) {
            const auto sq = gvt_cost(n, s, s, n, s, s);
            CHECK(sq.variant1 == 2 * s * n);
            CHECK(sq.variant2 == 2 * s * n);
        }
    }
}

TEST_CASE("gvt_matvec scalar example") {
    const auto a = DenseMatrix::from_rows({ { 2 } });
    const auto b = DenseMatrix::from_rows({ { 3 } });
    const std::vector<index_type> zero{ 0 };
    const GvtProblem p{ a, b, zero, zero, zero, zero };
    const std::vector<double> v{ 1 };
    for (auto variant : { GvtVariant::automatic, GvtVariant::first, GvtVariant::second }) {
        CHECK(gvt_matvec(p, v, variant) == std::vector<double>{ 6 });
    }
}

TEST_CASE("gvt_matvec identity Kronecker") {
    const auto i2 = DenseMatrix::identity(2);
    const std::vector<index_type> f{ 0, 0, 1, 1 };
    const std::vector<index_type> s{ 0, 1, 0, 1 };
    const GvtProblem p{ i2, i2, f, s, f, s };
    const std::vector<double> v{ 0.5, -2.0, 3.25, 7.0 };
    for (auto variant : { GvtVariant::first, GvtVariant::second }) {
        CHECK(gvt_matvec(p, v, variant) == v);
    }
}

TEST_CASE("gvt_matvec seeded instance against the double loop") {
    testing::Rng rng(2024);
    const auto a = testing::uniform_matrix(rng, 3, 3);
    const auto b = testing::uniform_matrix(rng, 2, 2);
    std::vector<index_type> in_f(5), in_s(5), out_f(4), out_s(4);
    for (std::size_t j = 0; j < 5; ++j) {
        in_f[j] = testing::draw(rng, 0, 2);
        in_s[j] = testing::draw(rng, 0, 1);
    }
    for (std::size_t i = 0; i < 4; ++i) {
        out_f[i] = testing::draw(rng, 0, 2);
        out_s[i] = testing::draw(rng, 0, 1);
    }
    const auto v = testing::normal_vector(rng, 5);
    const GvtProblem p{ a, b, out_f, out_s, in_f, in_s };
    const auto expected = testing::brute_kron_matvec(a, b, out_f, out_s, in_f, in_s, v);
    CHECK(rel_error(gvt_matvec(p, v), expected) <= 1e-10);
}

TEST_CASE("gvt op counter examples") {
    // n_out=3, m_out=2, q_out=2, n_in=4, m_in=3, q_in=2
    testing::Rng rng(5);
    const auto a = testing::uniform_matrix(rng, 2, 3);
    const auto b = testing::uniform_matrix(rng, 2, 2);
    const std::vector<index_type> out_f{ 0, 1, 1 }, out_s{ 0, 1, 0 };
    const std::vector<index_type> in_f{ 0, 1, 2, 2 }, in_s{ 1, 0, 0, 1 };
    const GvtProblem p{ a, b, out_f, out_s, in_f, in_s };
    const std::vector<double> v{ 1, 2, 3, 4 };

    GvtStats stats;
    (void) gvt_matvec(p, v, GvtVariant::first, &stats);
    CHECK(stats.last_ops == 17);
    CHECK(stats.last_intermediate_size == 2 * 3);
    (void) gvt_matvec(p, v, GvtVariant::automatic, &stats);
    CHECK(stats.last_ops == 14);
    CHECK(stats.last_variant == GvtVariant::second);
    CHECK(stats.last_intermediate_size == 2 * 2);
    CHECK(stats.total_ops == 31);
    CHECK(stats.calls == 2);

    const GvtProblem empty_in{ a, b, out_f, out_s, {}, {} };
    const auto u = gvt_matvec(empty_in, std::vector<double>{}, GvtVariant::automatic, &stats);
    CHECK(stats.last_ops == 0);
    CHECK(u == std::vector<double>(3, 0.0));
}

TEST_CASE("gvt_matvec rejects bad input before work") {
    const auto a = DenseMatrix::identity(2);
    const std::vector<index_type> ok{ 0, 1 };
    const std::vector<index_type> bad{ 0, 2 };
    const std::vector<double> v{ 1, 1 };
    CHECK_THROWS_AS((void) gvt_matvec(GvtProblem{ a, a, ok, ok, ok, ok }, std::vector<double>{ 1 }), std::invalid_argument);
    CHECK_THROWS_AS((void) gvt_matvec(GvtProblem{ a, a, bad, ok, ok, ok }, v), std::invalid_argument);
    CHECK_THROWS_AS((void) gvt_matvec(GvtProblem{ a, a, ok, ok, ok, bad }, v), std::invalid_argument);
    CHECK_THROWS_AS((void) gvt_matvec(GvtProblem{ a, a, ok, std::span<const index_type>(ok).first(1), ok, ok }, v), std::invalid_argument);
}

namespace {

struct RandomProblem {
    DenseMatrix a, b;
    std::vector<index_type> out_f, out_s, in_f, in_s;
    [[nodiscard]] GvtProblem problem() const { return { a, b, out_f, out_s, in_f, in_s }; }
};

RandomProblem random_problem(testing::Rng &rng) {
    RandomProblem r;
    const std::size_t m_out = testing::draw(rng, 1, 8), m_in = testing::draw(rng, 1, 8);
    const std::size_t q_out = testing::draw(rng, 1, 8), q_in = testing::draw(rng, 1, 8);
    r.a = testing::uniform_matrix(rng, m_out, m_in, -1, 1);
    r.b = testing::uniform_matrix(rng, q_out, q_in, -1, 1);
    const std::size_t n_out = testing::draw(rng, 0, 8), n_in = testing::draw(rng, 0, 8);
    for (std::size_t i = 0; i < n_out; ++i) {
        r.out_f.push_back(testing::draw(rng, 0, m_out - 1));
        r.out_s.push_back(testing::draw(rng, 0, q_out - 1));
    }
    for (std::size_t j = 0; j < n_in; ++j) {
        r.in_f.push_back(testing::draw(rng, 0, m_in - 1));
        r.in_s.push_back(testing::draw(rng, 0, q_in - 1));
    }
    return r;
}

}  // namespace

TEST_CASE("gvt properties over 200 seeded instances") {
    testing::Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        CAPTURE(trial);
        const RandomProblem r = random_problem(rng);
        const GvtProblem p = r.problem();
        const auto v = testing::normal_vector(rng, p.in_size());
        const auto w = testing::normal_vector(rng, p.in_size());
        const auto oracle = testing::brute_kron_matvec(r.a, r.b, r.out_f, r.out_s, r.in_f, r.in_s, v);

        GvtStats stats;
        const auto u = gvt_matvec(p, v, GvtVariant::automatic, &stats);
        REQUIRE(rel_error(u, oracle) <= 1e-10);
        const GvtCost cost = gvt_cost(p);
        REQUIRE(stats.last_ops == cost.minimum());
        REQUIRE(cost == gvt_cost(p.out_size(), r.a.rows(), r.b.rows(), p.in_size(), r.a.cols(), r.b.cols()));

        GvtStats s1, s2;
        const auto u1 = gvt_matvec(p, v, GvtVariant::first, &s1);
        const auto u2 = gvt_matvec(p, v, GvtVariant::second, &s2);
        REQUIRE(rel_error(u1, u2) <= 1e-10);
        REQUIRE(s1.last_ops == cost.variant1);
        REQUIRE(s2.last_ops == cost.variant2);
        const bool empty = p.in_size() == 0 || p.out_size() == 0;
        REQUIRE(s1.last_intermediate_size == (empty ? 0 : r.b.rows() * r.a.cols()));
        REQUIRE(s2.last_intermediate_size == (empty ? 0 : r.a.rows() * r.b.cols()));

        const double alpha = 1.5, beta = -0.25;
        const auto combo = testing::axpy(alpha, v, beta, w);
        const auto lhs = gvt_matvec(p, combo);
        const auto rhs = testing::axpy(alpha, gvt_matvec(p, v), beta, gvt_matvec(p, w));
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            REQUIRE(std::abs(lhs[i] - rhs[i]) <= 1e-10 * std::max(1.0, std::abs(rhs[i])));
        }
    }
}

TEST_CASE("gvt auto tie goes to variant 1") {
    const auto a = DenseMatrix::identity(2);
    const std::vector<index_type> ids{ 0, 1 };
    const GvtProblem p{ a, a, ids, ids, ids, ids };
    REQUIRE(gvt_cost(p).variant1 == gvt_cost(p).variant2);
    CHECK(resolve_variant(p, GvtVariant::automatic) == GvtVariant::first);
}

TEST_CASE("gvt_matvec is deterministic") {
    testing::Rng rng(3);
    const RandomProblem r = random_problem(rng);
    const auto v = testing::normal_vector(rng, r.in_f.size());
    CHECK(gvt_matvec(r.problem(), v) == gvt_matvec(r.problem(), v));
}
