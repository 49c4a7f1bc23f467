#include "pairkern/explicit_kernel.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace pairkern;

TEST_CASE("build_explicit examples") {
    const auto d = DenseMatrix::from_rows({ { 2 } });
    const auto t = DenseMatrix::from_rows({ { 3 } });
    const PairSample one({ 0 }, { 0 });
    const auto k = build_explicit(PairwiseKernel::kronecker, d, &t, one, one);
    CHECK(k.matrix == DenseMatrix::from_rows({ { 6 } }));
    CHECK(k.bytes() == sizeof(double));

    const auto i2 = DenseMatrix::identity(2);
    const PairSample grid({ 0, 0, 1, 1 }, { 0, 1, 0, 1 });
    const auto lin = build_explicit(PairwiseKernel::linear, i2, &i2, grid, grid);
    REQUIRE(lin.matrix.rows() == 4);
    REQUIRE(lin.matrix.cols() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double expected = (grid.pair(i).first == grid.pair(j).first ? 1.0 : 0.0) + (grid.pair(i).second == grid.pair(j).second ? 1.0 : 0.0);
            CHECK(lin.matrix(i, j) == expected);
        }
    }
}

TEST_CASE("explicit_matvec") {
    ExplicitKernelMatrix k;
    k.matrix = DenseMatrix::from_rows({ { 6 } });
    CHECK(explicit_matvec(k, std::vector<double>{ 2 }) == std::vector<double>{ 12 });
    k.matrix = DenseMatrix::identity(3);
    const std::vector<double> v{ 1, -2, 3 };
    CHECK(explicit_matvec(k, v) == v);
    CHECK_THROWS_AS((void) explicit_matvec(k, std::vector<double>{ 1, 2 }), std::invalid_argument);

    testing::Rng rng(3);
    k.matrix = testing::uniform_matrix(rng, 4, 5, -1, 1);
    const auto w = testing::normal_vector(rng, 5);
    const auto u = explicit_matvec(k, w);
    for (std::size_t i = 0; i < 4; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            s += k.matrix(i, j) * w[j];
        }
        CHECK(std::abs(u[i] - s) <= 1e-14);
    }
}

TEST_CASE("explicit oracle agrees with GVT for every kernel over 200 instances") {
    testing::Rng rng(99);
    for (const auto kernel : all_pairwise_kernels) {
        CAPTURE(to_string(kernel));
        const auto spec = decompose(kernel);
        for (int trial = 0; trial < 200; ++trial) {
            CAPTURE(trial);
            const auto inst = testing::random_instance(kernel, rng);
            const auto k = build_explicit(kernel, inst.drug.kernel, inst.target_matrix(), inst.out, inst.in);
            const auto oracle = explicit_matvec(k, inst.v);
            const auto fast = pairwise_matvec(spec, inst.drug.kernel, inst.target_matrix(), inst.out, inst.in, inst.v);
            REQUIRE(testing::rel_error(fast, oracle) <= 1e-10);
        }
    }
}

TEST_CASE("build_explicit enforces homogeneity") {
    const auto d = DenseMatrix::identity(2);
    const PairSample hetero({ 0 }, { 1 });
    CHECK_THROWS_AS((void) build_explicit(PairwiseKernel::mlpk, d, nullptr, hetero, hetero), std::invalid_argument);
}
