#include "krivine/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace krivine {

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm2(const double* a, int n) {
    return std::sqrt(dot(a, a, n));
}

double max_abs_asymmetry(const Matrix& a) {
    double worst = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = i + 1; j < a.cols; ++j)
            worst = std::max(worst, std::fabs(a.at(i, j) - a.at(j, i)));
    return worst;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* orow = out.row(i);
            for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

Matrix gram_cross(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) throw std::invalid_argument("gram_cross: dimension mismatch");
    Matrix out(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.rows; ++j)
            out.at(i, j) = dot(a.row(i), b.row(j), a.cols);
    return out;
}

EigenDecomposition jacobi_eigen(const Matrix& sym, int max_sweeps) {
    if (sym.rows != sym.cols) throw std::invalid_argument("jacobi_eigen: not square");
    const int n = sym.rows;
    Matrix a = sym;
    Matrix v(n, n);
    for (int i = 0; i < n; ++i) v.at(i, i) = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a.at(i, j) * a.at(i, j);
        return std::sqrt(2.0 * s);
    };

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a.at(i, j)));
    if (scale == 0.0) scale = 1.0;
    const double tol = 1e-15 * scale * n;

    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double app = a.at(p, p);
                const double aqq = a.at(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a.at(i, p);
                    const double aiq = a.at(i, q);
                    a.at(i, p) = c * aip - s * aiq;
                    a.at(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const double apj = a.at(p, j);
                    const double aqj = a.at(q, j);
                    a.at(p, j) = c * apj - s * aqj;
                    a.at(q, j) = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v.at(i, p);
                    const double viq = v.at(i, q);
                    v.at(i, p) = c * vip - s * viq;
                    v.at(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return a.at(x, x) < a.at(y, y); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a.at(order[j], order[j]);
        for (int i = 0; i < n; ++i) out.vectors.at(i, j) = v.at(i, order[j]);
    }
    return out;
}

} // namespace krivine
