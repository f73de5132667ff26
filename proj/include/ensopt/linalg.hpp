#pragma once
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ensopt/errors.hpp"

namespace ensopt {

using Vec = std::vector<double>;

// Dense row-major matrix. Sizes here are small (d <= 5 solver systems,
// 20x20 generator covariance), so no BLAS backing is warranted.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    std::span<double> row(int r) { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
    std::span<const double> row(int r) const {
        return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Matrix& o) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double norm2_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// Gaussian elimination with partial pivoting; a is n x n row-major, b length n.
// Returns false on (numerical) singularity instead of throwing: small KKT
// systems probe many candidate supports and skip the degenerate ones.
bool solve_linear(std::vector<double> a, Vec b, int n, Vec& out);

// Cholesky factor L (lower) of a symmetric positive definite matrix.
// Throws NumericError if the matrix is not positive definite.
Matrix cholesky(const Matrix& a);

// Eigenvalues and eigenvectors of a symmetric matrix via cyclic Jacobi.
// Returns eigenvalues ascending; columns of `vectors` are the eigenvectors.
void sym_eigen(const Matrix& a, Vec& values, Matrix& vectors);

// Mean of each column over the given rows (all rows when idx is empty).
Vec column_means(const Matrix& m, std::span<const int> idx = {});

// Sample covariance (normalized by n) of the columns of m.
Matrix covariance(const Matrix& m);

}  // namespace ensopt
