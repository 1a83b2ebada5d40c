#include "gnnmerge/linalg.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "gnnmerge/errors.hpp"

namespace gnnmerge {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw ShapeError("DenseMatrix: value count " + std::to_string(values_.size()) +
                         " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows[0].size();
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) {
            throw ShapeError("DenseMatrix::from_rows: ragged row " + std::to_string(i));
        }
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::string DenseMatrix::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: incompatible shapes " + a.shape_string() + " x " +
                         b.shape_string());
    }
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = c.row(i);
        const double* arow = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

DenseMatrix gram_accumulate(const DenseMatrix& acc, const DenseMatrix& z) {
    if (acc.rows() != acc.cols() || acc.rows() != z.cols()) {
        throw ShapeError("gram_accumulate: acc " + acc.shape_string() +
                         " must be square with side matching z cols (" + z.shape_string() + ")");
    }
    DenseMatrix out = acc;
    const std::size_t d = z.cols();
    // Accumulate the upper triangle left-to-right over rows, then mirror, so
    // the result is exactly symmetric.
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double sum = 0.0;
            for (std::size_t r = 0; r < z.rows(); ++r) sum += z(r, i) * z(r, j);
            out(i, j) += sum;
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
    return out;
}

DenseMatrix cross_accumulate(const DenseMatrix& acc, const DenseMatrix& z,
                             const DenseMatrix& g) {
    if (z.rows() != g.rows()) {
        throw ShapeError("cross_accumulate: z " + z.shape_string() + " and g " +
                         g.shape_string() + " row counts differ");
    }
    if (acc.rows() != z.cols() || acc.cols() != g.cols()) {
        throw ShapeError("cross_accumulate: acc " + acc.shape_string() + " must be " +
                         std::to_string(z.cols()) + "x" + std::to_string(g.cols()));
    }
    DenseMatrix out = acc;
    for (std::size_t r = 0; r < z.rows(); ++r) {
        const double* zrow = z.row(r);
        const double* grow = g.row(r);
        for (std::size_t i = 0; i < z.cols(); ++i) {
            const double zi = zrow[i];
            double* orow = out.row(i);
            for (std::size_t j = 0; j < g.cols(); ++j) orow[j] += zi * grow[j];
        }
    }
    return out;
}

namespace {

// In-place lower Cholesky; false when a pivot is non-positive or non-finite.
bool cholesky_factor(DenseMatrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    return true;
}

DenseMatrix cholesky_solve(const DenseMatrix& l, const DenseMatrix& b) {
    const std::size_t n = l.rows();
    DenseMatrix x = b;
    for (std::size_t col = 0; col < b.cols(); ++col) {
        // L y = b
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, col);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
            x(i, col) = s / l(i, i);
        }
        // L^T x = y
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x(ii, col);
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, col);
            x(ii, col) = s / l(ii, ii);
        }
    }
    return x;
}

double mean_abs_diagonal(const DenseMatrix& s) {
    if (s.rows() == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i) sum += std::fabs(s(i, i));
    return sum / static_cast<double>(s.rows());
}

} // namespace

DenseMatrix solve_spd(const DenseMatrix& s, const DenseMatrix& b, double ridge) {
    if (s.rows() != s.cols()) {
        throw ShapeError("solve_spd: s is not square (" + s.shape_string() + ")");
    }
    if (b.rows() != s.rows()) {
        throw ShapeError("solve_spd: b rows " + std::to_string(b.rows()) +
                         " do not match system side " + std::to_string(s.rows()));
    }
    if (!(ridge >= 0.0)) {
        throw ParameterError("solve_spd: ridge must be nonnegative");
    }
    const std::size_t n = s.rows();
    DenseMatrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (s(i, j) + s(j, i));

    double current = ridge;
    for (int attempt = 0; attempt <= 6; ++attempt) {
        DenseMatrix a = sym;
        for (std::size_t i = 0; i < n; ++i) a(i, i) += current;
        if (cholesky_factor(a)) return cholesky_solve(a, b);
        if (attempt == 6) break;
        if (current == 0.0) {
            // An escalation needs a nonzero seed; scale it to the matrix.
            const double base = mean_abs_diagonal(sym);
            current = base > 0.0 ? 1e-12 * base : 1e-30;
        } else {
            current *= 10.0;
        }
    }
    std::ostringstream msg;
    msg << "solve_spd: factorization failed for " << n << "x" << n
        << " system after ridge escalation; final ridge " << current;
    throw SingularMatrixError(msg.str());
}

double frobenius_norm(const DenseMatrix& a) {
    double sum = 0.0;
    for (double v : a.values()) sum += v * v;
    return std::sqrt(sum);
}

double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("frobenius_dot: shapes " + a.shape_string() + " vs " + b.shape_string());
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a.values()[i] * b.values()[i];
    return sum;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("add: shapes " + a.shape_string() + " vs " + b.shape_string());
    }
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.values()[i] += b.values()[i];
    return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("subtract: shapes " + a.shape_string() + " vs " + b.shape_string());
    }
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.values()[i] -= b.values()[i];
    return c;
}

DenseMatrix scale(const DenseMatrix& a, double factor) {
    DenseMatrix c = a;
    for (double& v : c.values()) v *= factor;
    return c;
}

void axpy(DenseMatrix& a, double factor, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("axpy: shapes " + a.shape_string() + " vs " + b.shape_string());
    }
    for (std::size_t i = 0; i < a.size(); ++i) a.values()[i] += factor * b.values()[i];
}

bool all_finite(const DenseMatrix& a) {
    for (double v : a.values())
        if (!std::isfinite(v)) return false;
    return true;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("max_abs_diff: shapes " + a.shape_string() + " vs " + b.shape_string());
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a.values()[i] - b.values()[i]);
        if (d > m) m = d;
    }
    return m;
}

double relative_frobenius_diff(const DenseMatrix& a, const DenseMatrix& b) {
    const double denom = frobenius_norm(b);
    return frobenius_norm(subtract(a, b)) / std::max(denom, 1e-300);
}

bool bits_equal(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (a.size() == 0) return true;
    return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

} // namespace gnnmerge
