#include "krivine/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "krivine/errors.hpp"

namespace krivine {

namespace {

// Inner products of floating-point unit vectors can poke past 1 by a few ulp.
double clamp_correlation(double t) {
    return std::clamp(t, -1.0, 1.0);
}

} // namespace

double kernel_cross(double t, const KrivineScheme& scheme) {
    if (!(std::fabs(t) <= 1.0 + 1e-9))
        throw std::invalid_argument("kernel_cross: |t| must be <= 1");
    return eval_inverse_series(scheme.inv, scheme.c * clamp_correlation(t));
}

double kernel_same(double t, const KrivineScheme& scheme) {
    if (!(std::fabs(t) <= 1.0 + 1e-9))
        throw std::invalid_argument("kernel_same: |t| must be <= 1");
    return eval_abs_series(scheme.inv, scheme.c * clamp_correlation(t)) + scheme.padding();
}

BlockKernel transform_gram(const Matrix& g_block, int m, int n,
                           const KrivineScheme& scheme) {
    const int size = m + n;
    if (m < 1 || n < 1) throw std::invalid_argument("transform_gram: empty side");
    if (g_block.rows != size || g_block.cols != size)
        throw std::invalid_argument("transform_gram: Gram matrix must be (m+n) x (m+n)");
    if (max_abs_asymmetry(g_block) > 1e-12)
        throw numeric_error("transform_gram: input not a Gram matrix (asymmetric)");
    for (int i = 0; i < size; ++i)
        if (std::fabs(g_block.at(i, i) - 1.0) > 1e-10)
            throw numeric_error("transform_gram: input not a Gram matrix (diagonal not 1)");
    {
        EigenDecomposition eig = jacobi_eigen(g_block);
        if (eig.values[0] < -1e-8)
            throw numeric_error("transform_gram: input not a Gram matrix (not PSD)");
    }

    BlockKernel kernel;
    kernel.m = m;
    kernel.n = n;
    kernel.H = Matrix(size, size);
    for (int i = 0; i < size; ++i) {
        for (int j = i; j < size; ++j) {
            const bool same_side = (i < m) == (j < m);
            const double t = g_block.at(i, j);
            const double v = same_side ? kernel_same(t, scheme) : kernel_cross(t, scheme);
            kernel.H.at(i, j) = v;
            kernel.H.at(j, i) = v;
        }
    }

    EigenDecomposition eig = jacobi_eigen(kernel.H);
    kernel.min_eigenvalue = eig.values[0];
    if (kernel.min_eigenvalue < -1e-8)
        throw numeric_error("transform_gram: kernel not PSD (truncation too coarse)");
    return kernel;
}

VectorSolution realize_vectors(BlockKernel& kernel) {
    const int size = kernel.size();
    EigenDecomposition eig = jacobi_eigen(kernel.H);
    kernel.min_eigenvalue = eig.values[0];
    if (kernel.min_eigenvalue < -1e-8)
        throw numeric_error("realize_vectors: kernel not PSD");

    bool clipped = false;
    std::vector<double> scale(size);
    for (int j = 0; j < size; ++j) {
        double lambda = eig.values[j];
        if (lambda < 0.0) {
            lambda = 0.0;
            clipped = true;
        }
        scale[j] = std::sqrt(lambda);
    }
    if (clipped) kernel.clipped = true;

    Matrix rows(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            rows.at(i, j) = eig.vectors.at(i, j) * scale[j];

    for (int i = 0; i < size; ++i) {
        const double norm = norm2(rows.row(i), size);
        if (norm > 0.0)
            for (int j = 0; j < size; ++j) rows.at(i, j) /= norm;
    }

    VectorSolution out;
    out.X = Matrix(kernel.m, size);
    out.Y = Matrix(kernel.n, size);
    for (int i = 0; i < kernel.m; ++i)
        for (int j = 0; j < size; ++j) out.X.at(i, j) = rows.at(i, j);
    for (int i = 0; i < kernel.n; ++i)
        for (int j = 0; j < size; ++j) out.Y.at(i, j) = rows.at(kernel.m + i, j);
    return out;
}

Matrix joint_gram(const VectorSolution& solution) {
    const int m = solution.m();
    const int n = solution.n();
    const int d = solution.dim();
    Matrix g(m + n, m + n);
    auto row_of = [&](int i) {
        return i < m ? solution.X.row(i) : solution.Y.row(i - m);
    };
    for (int i = 0; i < m + n; ++i) {
        for (int j = i; j < m + n; ++j) {
            const double v = i == j ? 1.0 : dot(row_of(i), row_of(j), d);
            g.at(i, j) = v;
            g.at(j, i) = v;
        }
    }
    return g;
}

VectorSolution preprocess(const VectorSolution& solution, const KrivineScheme& scheme) {
    BlockKernel kernel = transform_gram(joint_gram(solution), solution.m(), solution.n(), scheme);
    VectorSolution out = realize_vectors(kernel);
    out.value = solution.value;
    out.converged = solution.converged;
    return out;
}

} // namespace krivine
