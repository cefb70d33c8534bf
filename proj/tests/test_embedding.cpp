#include <doctest.h>

#include <cmath>
#include <vector>

#include "krivine/embedding.hpp"
#include "krivine/errors.hpp"
#include "krivine/rng.hpp"

using namespace krivine;

namespace {

Matrix random_unit_rows(int rows, int cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j)
            m.at(i, j) = rng::gaussian_at(seed, static_cast<std::uint64_t>(i) * cols + j);
        const double norm = norm2(m.row(i), cols);
        for (int j = 0; j < cols; ++j) m.at(i, j) /= norm;
    }
    return m;
}

VectorSolution random_configuration(int m, int n, int d, std::uint64_t seed) {
    VectorSolution sol;
    sol.X = random_unit_rows(m, d, rng::substream(seed, 0));
    sol.Y = random_unit_rows(n, d, rng::substream(seed, 1));
    return sol;
}

} // namespace

TEST_CASE("kernel_cross oracle values") {
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    CHECK(kernel_cross(0.0, s) == 0.0);
    // f_1^{-1}(c) = sin(pi c / 2) = sin(ln(1+sqrt 2))
    CHECK(std::fabs(kernel_cross(1.0, s) - std::sin(std::log(1.0 + std::sqrt(2.0)))) < 1e-10);

    // t chosen so that c t = f_k(0.3) makes the kernel the inverse of eval_fk
    for (int k : {1, 4, 16}) {
        KrivineScheme sk = build_scheme(k, SchemeMode::sharp);
        const double t = eval_fk(sk.fwd, 0.3) / sk.c;
        CHECK(std::fabs(kernel_cross(t, sk) - 0.3) < 1e-8);
    }
}

TEST_CASE("kernel_same normalization and padding") {
    for (int k : {1, 2, 16}) {
        KrivineScheme s = build_scheme(k, SchemeMode::sharp);
        CHECK(std::fabs(kernel_same(1.0, s) - 1.0) <= 1e-10);
        CHECK(kernel_same(0.0, s) == 0.0);
    }
    for (int k : {8, 64}) {
        KrivineScheme s = build_scheme(k, SchemeMode::paper);
        CHECK(std::fabs(kernel_same(1.0, s) - 1.0) <= 1e-10);
        CHECK(kernel_same(0.0, s) == doctest::Approx(4.0 * s.C_value / k).epsilon(1e-15));
    }
}

TEST_CASE("same-side kernel dominates the cross kernel") {
    for (int k : {1, 8}) {
        for (SchemeMode mode : {SchemeMode::sharp, SchemeMode::paper}) {
            if (k == 1 && mode == SchemeMode::paper) continue;
            KrivineScheme s = build_scheme(k, mode);
            for (int i = 0; i <= 40; ++i) {
                const double t = -1.0 + 0.05 * i;
                CHECK(std::fabs(kernel_cross(t, s)) <=
                      kernel_same(std::fabs(t), s) - s.padding() + 1e-15);
            }
        }
    }
}

TEST_CASE("transform_gram of the identity in sharp mode is the identity") {
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    Matrix g(4, 4);
    for (int i = 0; i < 4; ++i) g.at(i, i) = 1.0;
    BlockKernel kernel = transform_gram(g, 2, 2, s);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j)
                CHECK(std::fabs(kernel.H.at(i, j) - 1.0) <= 1e-10);
            else
                CHECK(kernel.H.at(i, j) == 0.0);
        }
    CHECK(kernel.min_eigenvalue >= -1e-8);
}

TEST_CASE("transform_gram cross entry at full alignment") {
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    Matrix g(2, 2);
    g.at(0, 0) = g.at(1, 1) = 1.0;
    g.at(0, 1) = g.at(1, 0) = 1.0;  // x and y aligned
    BlockKernel kernel = transform_gram(g, 1, 1, s);
    CHECK(kernel.H.at(0, 1) ==
          doctest::Approx(std::sin(std::log(1.0 + std::sqrt(2.0)))).epsilon(1e-10));
}

TEST_CASE("transform_gram validates its input") {
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    Matrix asym(2, 2);
    asym.at(0, 0) = asym.at(1, 1) = 1.0;
    asym.at(0, 1) = 0.3;
    asym.at(1, 0) = 0.2;
    CHECK_THROWS_WITH_AS(transform_gram(asym, 1, 1, s), doctest::Contains("asymmetric"),
                         numeric_error);

    Matrix diag(2, 2);
    diag.at(0, 0) = 1.0;
    diag.at(1, 1) = 0.5;
    CHECK_THROWS_WITH_AS(transform_gram(diag, 1, 1, s), doctest::Contains("diagonal"),
                         numeric_error);

    Matrix indef(2, 2);
    indef.at(0, 0) = indef.at(1, 1) = 1.0;
    indef.at(0, 1) = indef.at(1, 0) = 1.5;  // eigenvalues 2.5 and -0.5
    CHECK_THROWS_WITH_AS(transform_gram(indef, 1, 1, s), doctest::Contains("not PSD"),
                         numeric_error);

    Matrix wrong(3, 3);
    CHECK_THROWS_AS(transform_gram(wrong, 2, 2, s), std::invalid_argument);
}

TEST_CASE("transform_gram depends only on the Gram matrix") {
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    VectorSolution a = random_configuration(3, 2, 5, 77);
    // isometric embedding into a higher dimension: zero padding leaves every
    // inner product bit-identical
    VectorSolution b;
    b.X = Matrix(3, 8);
    b.Y = Matrix(2, 8);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) b.X.at(i, j) = a.X.at(i, j);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 5; ++j) b.Y.at(i, j) = a.Y.at(i, j);

    Matrix ga = joint_gram(a);
    Matrix gb = joint_gram(b);
    for (int i = 0; i < ga.rows; ++i)
        for (int j = 0; j < ga.cols; ++j)
            REQUIRE(ga.at(i, j) == gb.at(i, j));  // bit-identical Grams...

    BlockKernel ka = transform_gram(ga, 3, 2, s);
    BlockKernel kb = transform_gram(gb, 3, 2, s);
    for (std::size_t i = 0; i < ka.H.data.size(); ++i)
        CHECK(ka.H.data[i] == kb.H.data[i]);  // ...give bit-identical kernels
}

TEST_CASE("realize_vectors reproduces the kernel Gram") {
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);

    SUBCASE("identity kernel gives orthonormal vectors") {
        Matrix g(4, 4);
        for (int i = 0; i < 4; ++i) g.at(i, i) = 1.0;
        BlockKernel kernel = transform_gram(g, 2, 2, s);
        VectorSolution sol = realize_vectors(kernel);
        Matrix gram = joint_gram(sol);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(std::fabs(gram.at(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
        CHECK_FALSE(kernel.clipped);
    }

    SUBCASE("rank-one kernel gives identical vectors") {
        BlockKernel kernel;
        kernel.m = 2;
        kernel.n = 1;
        kernel.H = Matrix(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) kernel.H.at(i, j) = 1.0;
        VectorSolution sol = realize_vectors(kernel);
        Matrix gram = joint_gram(sol);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::fabs(gram.at(i, j) - 1.0) <= 1e-10);
    }

    SUBCASE("random PSD unit-diagonal kernel reconstructs within 1e-8") {
        VectorSolution cfg = random_configuration(3, 2, 4, 123);
        BlockKernel kernel = transform_gram(joint_gram(cfg), 3, 2, s);
        Matrix H = kernel.H;
        VectorSolution sol = realize_vectors(kernel);
        Matrix gram = joint_gram(sol);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) CHECK(std::fabs(gram.at(i, j) - H.at(i, j)) <= 1e-8);
    }
}

TEST_CASE("realize_vectors clips slightly negative eigenvalues and flags it") {
    // rank-deficient Gram (three copies of the same vector) pushed just below
    // zero: eigenvalues {3 - eps, -eps, -eps}
    BlockKernel kernel;
    kernel.m = 2;
    kernel.n = 1;
    kernel.H = Matrix(3, 3);
    const double eps = 5e-9;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) kernel.H.at(i, j) = (i == j) ? 1.0 : 1.0 + eps;
    VectorSolution sol = realize_vectors(kernel);
    CHECK(kernel.clipped);
    Matrix gram = joint_gram(sol);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::fabs(gram.at(i, j) - kernel.H.at(i, j)) <= 1e-8);

    BlockKernel bad = kernel;
    bad.H.at(0, 1) = bad.H.at(1, 0) = 1.1;  // genuinely indefinite now
    CHECK_THROWS_WITH_AS(realize_vectors(bad), doctest::Contains("not PSD"), numeric_error);
}

TEST_CASE("PSD preservation over a randomized suite") {
    KrivineScheme sharp1 = build_scheme(1, SchemeMode::sharp);
    KrivineScheme paper8 = build_scheme(8, SchemeMode::paper);
    int cases = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const int m = 1 + static_cast<int>(rng::bits(900, 3 * trial) % 6);
        const int n = 1 + static_cast<int>(rng::bits(900, 3 * trial + 1) % 6);
        const int d = 2 + static_cast<int>(rng::bits(900, 3 * trial + 2) % (m + n));
        VectorSolution cfg = random_configuration(m, n, d, 1000 + trial);
        const KrivineScheme& s = (trial % 2 == 0) ? sharp1 : paper8;
        BlockKernel kernel = transform_gram(joint_gram(cfg), m, n, s);
        CHECK(kernel.min_eigenvalue >= -1e-8);
        ++cases;
    }
    CHECK(cases == 200);
}

TEST_CASE("preprocessing realizes the revised scheme identity") {
    // <x'_i, y'_j> = f_k^{-1}(c <x_i, y_j>) for every pair
    for (int k : {1, 4}) {
        KrivineScheme s = build_scheme(k, SchemeMode::sharp);
        VectorSolution cfg = random_configuration(4, 3, 5, 55 + k);
        Matrix original = joint_gram(cfg);
        VectorSolution pre = preprocess(cfg, s);
        Matrix after = joint_gram(pre);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) {
                const double t = original.at(i, 4 + j);
                const double expect = eval_inverse_series(s.inv, s.c * t);
                CHECK(std::fabs(after.at(i, 4 + j) - expect) <= 1e-8);
            }
    }
}
