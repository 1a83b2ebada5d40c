#include <doctest.h>

#include <cmath>

#include "gnnmerge/errors.hpp"
#include "gnnmerge/linalg.hpp"
#include "gnnmerge/rng.hpp"
#include "test_util.hpp"

using namespace gnnmerge;

namespace {

// Independent naive triple-loop product (j-inner, explicit indexing).
DenseMatrix naive_matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
            c(i, j) = sum;
        }
    return c;
}

// Gaussian elimination with partial pivoting, column RHS at a time.
DenseMatrix gaussian_solve(DenseMatrix a, DenseMatrix b) {
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(pivot, j));
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(r, j) -= f * b(col, j);
        }
    }
    DenseMatrix x(n, b.cols());
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t ri = n; ri-- > 0;) {
            double s = b(ri, col);
            for (std::size_t j = ri + 1; j < n; ++j) s -= a(ri, j) * x(j, col);
            x(ri, col) = s / a(ri, ri);
        }
    }
    return x;
}

} // namespace

TEST_CASE("matmul identity and hand cases") {
    Rng rng(1);
    const DenseMatrix a = testutil::random_matrix(3, 3, rng);
    CHECK(bits_equal(matmul(DenseMatrix::identity(3), a), a));

    const DenseMatrix m = DenseMatrix::from_rows({{1, 2}, {3, 4}});
    const DenseMatrix p = DenseMatrix::from_rows({{0, 1}, {1, 0}});
    const DenseMatrix expect = DenseMatrix::from_rows({{2, 1}, {4, 3}});
    CHECK(max_abs_diff(matmul(m, p), expect) == 0.0);
}

TEST_CASE("matmul matches naive oracle") {
    Rng rng(2);
    const DenseMatrix a = testutil::random_matrix(7, 5, rng);
    const DenseMatrix b = testutil::random_matrix(5, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), naive_matmul(a, b)) <= 1e-12);
}

TEST_CASE("matmul shape error names both shapes") {
    const DenseMatrix a(2, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"), ShapeError);
}

TEST_CASE("matmul associativity property") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const DenseMatrix a = testutil::random_matrix(6, 4, rng);
        const DenseMatrix b = testutil::random_matrix(4, 5, rng);
        const DenseMatrix c = testutil::random_matrix(5, 3, rng);
        const DenseMatrix left = matmul(matmul(a, b), c);
        const DenseMatrix right = matmul(a, matmul(b, c));
        CHECK(relative_frobenius_diff(left, right) <= 1e-10);
    }
}

TEST_CASE("gram_accumulate hand cases") {
    CHECK(bits_equal(gram_accumulate(DenseMatrix(2, 2), DenseMatrix::identity(2)),
                     DenseMatrix::identity(2)));
    const DenseMatrix z = DenseMatrix::from_rows({{1, 1}});
    const DenseMatrix out = gram_accumulate(DenseMatrix::identity(2), z);
    CHECK(max_abs_diff(out, DenseMatrix::from_rows({{2, 1}, {1, 2}})) == 0.0);
}

TEST_CASE("gram of two chunks equals gram of the stack") {
    Rng rng(4);
    const DenseMatrix top = testutil::random_matrix(50, 8, rng);
    const DenseMatrix bottom = testutil::random_matrix(50, 8, rng);
    DenseMatrix stacked(100, 8);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            stacked(i, j) = top(i, j);
            stacked(50 + i, j) = bottom(i, j);
        }
    const DenseMatrix chunked = gram_accumulate(gram_accumulate(DenseMatrix(8, 8), top), bottom);
    const DenseMatrix whole = gram_accumulate(DenseMatrix(8, 8), stacked);
    CHECK(relative_frobenius_diff(chunked, whole) <= 1e-10);
}

TEST_CASE("gram_accumulate output is exactly symmetric") {
    Rng rng(5);
    const DenseMatrix z = testutil::random_matrix(40, 6, rng);
    const DenseMatrix g = gram_accumulate(DenseMatrix(6, 6), z);
    const DenseMatrix diff = subtract(g, transpose(g));
    CHECK(frobenius_norm(diff) <= 1e-12 * frobenius_norm(g));
    CHECK_THROWS_AS(gram_accumulate(DenseMatrix(5, 5), z), ShapeError);
}

TEST_CASE("cross_accumulate hand and oracle cases") {
    Rng rng(6);
    const DenseMatrix w = testutil::random_matrix(2, 2, rng);
    CHECK(bits_equal(cross_accumulate(DenseMatrix(2, 2), DenseMatrix::identity(2), w), w));

    // z^T (z W) == (z^T z) W algebraically
    const DenseMatrix z = DenseMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
    const DenseMatrix zw = matmul(z, w);
    const DenseMatrix lhs = cross_accumulate(DenseMatrix(2, 2), z, zw);
    const DenseMatrix rhs = matmul(gram_accumulate(DenseMatrix(2, 2), z), w);
    CHECK(relative_frobenius_diff(lhs, rhs) <= 1e-12);

    const DenseMatrix za = testutil::random_matrix(9, 4, rng);
    const DenseMatrix ga = testutil::random_matrix(9, 3, rng);
    CHECK(max_abs_diff(cross_accumulate(DenseMatrix(4, 3), za, ga),
                       naive_matmul(transpose(za), ga)) <= 1e-12);
    CHECK_THROWS_AS(cross_accumulate(DenseMatrix(4, 3), za, testutil::random_matrix(8, 3, rng)),
                    ShapeError);
}

TEST_CASE("solve_spd identity and scaled identity") {
    Rng rng(7);
    const DenseMatrix b = testutil::random_matrix(4, 3, rng);
    CHECK(relative_frobenius_diff(solve_spd(DenseMatrix::identity(4), b, 0.0), b) <= 1e-14);

    const DenseMatrix s = scale(DenseMatrix::identity(2), 2.0);
    const DenseMatrix rhs = DenseMatrix::from_rows({{4}, {6}});
    const DenseMatrix x = solve_spd(s, rhs, 0.0);
    CHECK(max_abs_diff(x, DenseMatrix::from_rows({{2}, {3}})) <= 1e-14);
}

TEST_CASE("solve_spd matches Gaussian-elimination oracle") {
    Rng rng(8);
    const DenseMatrix a = testutil::random_matrix(10, 10, rng);
    const DenseMatrix s = add(gram_accumulate(DenseMatrix(10, 10), a), DenseMatrix::identity(10));
    const DenseMatrix b = testutil::random_matrix(10, 4, rng);
    const DenseMatrix x = solve_spd(s, b, 0.0);
    const DenseMatrix oracle = gaussian_solve(s, b);
    CHECK(relative_frobenius_diff(x, oracle) <= 1e-9);
}

TEST_CASE("solve_spd residual bound and recovery") {
    Rng rng(9);
    const DenseMatrix a = testutil::random_matrix(12, 12, rng);
    const DenseMatrix s = add(gram_accumulate(DenseMatrix(12, 12), a),
                              scale(DenseMatrix::identity(12), 0.5));
    const DenseMatrix x0 = testutil::random_matrix(12, 5, rng);
    const DenseMatrix b = matmul(s, x0);
    const DenseMatrix x = solve_spd(s, b, 0.0);
    CHECK(relative_frobenius_diff(x, x0) <= 1e-8);
    const DenseMatrix residual = subtract(matmul(s, x), b);
    CHECK(frobenius_norm(residual) <= 1e-8 * frobenius_norm(s) * frobenius_norm(x));
}

TEST_CASE("solve_spd is deterministic") {
    Rng rng(10);
    const DenseMatrix a = testutil::random_matrix(9, 9, rng);
    const DenseMatrix s = gram_accumulate(DenseMatrix(9, 9), a);
    const DenseMatrix b = testutil::random_matrix(9, 2, rng);
    CHECK(bits_equal(solve_spd(s, b, 1e-8), solve_spd(s, b, 1e-8)));
}

TEST_CASE("solve_spd escalates ridge on rank deficiency") {
    // Rank-1 PSD system; plain Cholesky fails, escalation must kick in.
    Rng rng(11);
    const DenseMatrix z = DenseMatrix::from_rows({{1, 1, 1}});
    const DenseMatrix s = gram_accumulate(DenseMatrix(3, 3), z);
    const DenseMatrix b = testutil::random_matrix(3, 1, rng);
    const DenseMatrix x = solve_spd(s, b, 0.0);
    CHECK(all_finite(x));
    CHECK_THROWS_AS(solve_spd(DenseMatrix(2, 3), b, 0.0), ShapeError);
}

TEST_CASE("solve_spd reports final ridge on hopeless systems") {
    // A matrix with a negative eigenvalue beyond any reasonable ridge.
    DenseMatrix s = scale(DenseMatrix::identity(3), -1e30);
    const DenseMatrix b(3, 1);
    CHECK_THROWS_WITH_AS(solve_spd(s, b, 1.0), doctest::Contains("final ridge"),
                         SingularMatrixError);
}

TEST_CASE("frobenius_norm cases") {
    CHECK(frobenius_norm(DenseMatrix(3, 3)) == 0.0);
    CHECK(frobenius_norm(DenseMatrix::from_rows({{3, 4}})) == doctest::Approx(5.0).epsilon(1e-12));
    Rng rng(12);
    const DenseMatrix m = testutil::random_matrix(6, 6, rng);
    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) sum += m(i, j) * m(i, j);
    CHECK(frobenius_norm(m) == doctest::Approx(std::sqrt(sum)).epsilon(1e-12));
}
