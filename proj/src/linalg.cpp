#include "ensopt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ensopt {

bool solve_linear(std::vector<double> a, Vec b, int n, Vec& out) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a[static_cast<size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-13) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a[static_cast<size_t>(piv) * n + c], a[static_cast<size_t>(col) * n + c]);
            std::swap(b[piv], b[col]);
        }
        const double d = a[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[static_cast<size_t>(r) * n + c] -= f * a[static_cast<size_t>(col) * n + c];
            b[r] -= f * b[col];
        }
    }
    out.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[static_cast<size_t>(r) * n + c] * out[c];
        out[r] = s / a[static_cast<size_t>(r) * n + r];
    }
    return true;
}

Matrix cholesky(const Matrix& a) {
    const int n = a.rows();
    Matrix l(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw NumericError("cholesky: matrix is not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

void sym_eigen(const Matrix& a, Vec& values, Matrix& vectors) {
    const int n = a.rows();
    Matrix m = a;
    vectors = Matrix(n, n, 0.0);
    for (int i = 0; i < n; ++i) vectors(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vectors(k, p), vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - s * vkq;
                    vectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    values.assign(n, 0.0);
    for (int i = 0; i < n; ++i) values[i] = m(i, i);

    // Sort ascending, permuting eigenvector columns to match.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return values[x] < values[y]; });
    Vec sorted_vals(n);
    Matrix sorted_vecs(n, n);
    for (int j = 0; j < n; ++j) {
        sorted_vals[j] = values[order[j]];
        for (int i = 0; i < n; ++i) sorted_vecs(i, j) = vectors(i, order[j]);
    }
    values = std::move(sorted_vals);
    vectors = std::move(sorted_vecs);
}

Vec column_means(const Matrix& m, std::span<const int> idx) {
    Vec mean(m.cols(), 0.0);
    if (idx.empty()) {
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) mean[c] += m(r, c);
        for (auto& v : mean) v /= m.rows();
    } else {
        for (int r : idx)
            for (int c = 0; c < m.cols(); ++c) mean[c] += m(r, c);
        for (auto& v : mean) v /= static_cast<double>(idx.size());
    }
    return mean;
}

Matrix covariance(const Matrix& m) {
    const int n = m.rows(), d = m.cols();
    const Vec mean = column_means(m);
    Matrix cov(d, d, 0.0);
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < d; ++i) {
            const double di = m(r, i) - mean[i];
            for (int j = i; j < d; ++j) cov(i, j) += di * (m(r, j) - mean[j]);
        }
    }
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            cov(i, j) /= n;
            cov(j, i) = cov(i, j);
        }
    return cov;
}

}  // namespace ensopt
