#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gnnmerge {

/// Dense row-major matrix of 64-bit floats. All merge arithmetic runs in
/// double precision even where forward passes could tolerate less: the
/// normal equations square the condition number of the captured activations.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    /// Builds from nested initializer-style data; rows must be equal length.
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    const double* row(std::size_t i) const { return values_.data() + i * cols_; }
    double* row(std::size_t i) { return values_.data() + i * cols_; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    std::string shape_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// c[i][j] = sum_k a[i][k] * b[k][j]. Throws ShapeError naming both shapes
/// when a.cols != b.rows.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

/// acc + z^T z with acc square of side z.cols. The result is exactly
/// symmetric: the upper triangle is accumulated once and mirrored.
DenseMatrix gram_accumulate(const DenseMatrix& acc, const DenseMatrix& z);

/// acc + z^T g; acc must be (z.cols x g.cols) and z.rows == g.rows.
DenseMatrix cross_accumulate(const DenseMatrix& acc, const DenseMatrix& z,
                             const DenseMatrix& g);

/// Solves (s + ridge*I) X = b for a symmetric positive (semi)definite s via
/// Cholesky factorization. s is symmetrized as (s + s^T)/2 before
/// factorization. On factorization failure the ridge is escalated by x10 up
/// to 6 times before a SingularMatrixError reporting the final ridge.
DenseMatrix solve_spd(const DenseMatrix& s, const DenseMatrix& b, double ridge);

double frobenius_norm(const DenseMatrix& a);

/// Frobenius inner product <a, b>.
double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double factor);

/// a += factor * b (shapes must match).
void axpy(DenseMatrix& a, double factor, const DenseMatrix& b);

bool all_finite(const DenseMatrix& a);

/// max_ij |a - b|; shapes must match.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// ||a - b||_F / max(||b||_F, eps).
double relative_frobenius_diff(const DenseMatrix& a, const DenseMatrix& b);

bool bits_equal(const DenseMatrix& a, const DenseMatrix& b);

} // namespace gnnmerge
