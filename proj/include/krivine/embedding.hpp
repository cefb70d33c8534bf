#pragma once

#include "krivine/linalg.hpp"
#include "krivine/series.hpp"

namespace krivine {

// Gram matrix of the preprocessed embeddings. First m indices carry the
// x'-side, the last n the y'-side.
struct BlockKernel {
    int m = 0;
    int n = 0;
    Matrix H;
    double min_eigenvalue = 0.0;
    bool clipped = false;

    int size() const { return m + n; }
};

// Unit-vector configurations for both sides of the bilinear form, rows of
// X and Y, common dimension X.cols == Y.cols.
struct VectorSolution {
    Matrix X;  // m x d
    Matrix Y;  // n x d
    double value = 0.0;
    bool converged = true;

    int m() const { return X.rows; }
    int n() const { return Y.rows; }
    int dim() const { return X.cols; }
};

// Cross-side kernel: <T(x), S(y)> = sum_n b_n (c t)^{2n+1} = f_k^{-1}(c t)
// up to truncation, where t = <x, y>.
double kernel_cross(double t, const KrivineScheme& scheme);

// Same-side kernel: sum_n |b_n| (c t)^{2n+1} + padding, with the padding
// coordinate contributing 4C/k in paper mode. Equals 1 at t = 1.
double kernel_same(double t, const KrivineScheme& scheme);

// Applies the preprocessing maps entrywise to the joint Gram matrix of the
// input unit vectors: same-side blocks through kernel_same, cross blocks
// through kernel_cross. Validates that the input is a Gram matrix (symmetric,
// unit diagonal, eigenvalues >= -1e-8) and that the output kernel is PSD to
// the same tolerance.
BlockKernel transform_gram(const Matrix& g_block, int m, int n,
                           const KrivineScheme& scheme);

// Factorizes H back into unit vectors in R^{m+n} whose Gram matrix
// reproduces H entrywise within 1e-8. Eigenvalues in [-1e-8, 0) are clipped
// to zero and rows renormalized; the kernel's clipped flag records this.
VectorSolution realize_vectors(BlockKernel& kernel);

// Joint (m+n) x (m+n) Gram matrix of a configuration.
Matrix joint_gram(const VectorSolution& solution);

// Full preprocessing step: joint Gram -> transform -> realize.
VectorSolution preprocess(const VectorSolution& solution, const KrivineScheme& scheme);

} // namespace krivine
