#pragma once

#include <cstddef>
#include <vector>

namespace krivine {

// Dense row-major matrix, just enough surface for this project.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }
    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi eigensolver for symmetric matrices. Deterministic sweep
// order; fine for the dimensions this project sees (a few hundred at most).
EigenDecomposition jacobi_eigen(const Matrix& sym, int max_sweeps = 64);

double max_abs_asymmetry(const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// Gram matrix of the rows of a against the rows of b (a * b^T).
Matrix gram_cross(const Matrix& a, const Matrix& b);

double dot(const double* a, const double* b, int n);
double norm2(const double* a, int n);

} // namespace krivine
