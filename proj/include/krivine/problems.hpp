#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "krivine/embedding.hpp"
#include "krivine/linalg.hpp"

namespace krivine {

// The m x n bilinear form matrix A.
struct ProblemInstance {
    Matrix A;

    int m() const { return A.rows; }
    int n() const { return A.cols; }
};

struct SignAssignment {
    std::vector<int> eps;    // m entries, each +1 or -1
    std::vector<int> delta;  // n entries
    double value = 0.0;
};

double objective(const ProblemInstance& instance, const std::vector<int>& eps,
                 const std::vector<int>& delta);

double vector_objective(const ProblemInstance& instance, const VectorSolution& solution);

// Exact sign maximizer of sum a_ij eps_i delta_j. Enumerates the smaller side
// only (Gray-code updates), choosing the other side in closed form:
// delta_j = sign(sum_i a_ij eps_i), with sign(0) = +1. Ties go to the first
// pattern seen, starting from all +1.
SignAssignment brute_force_opt(const ProblemInstance& instance);

inline constexpr int kBruteForceSideLimit = 24;

struct SdpOptions {
    int rank = -1;          // -1: min(m+n, 20)
    int restarts = 5;
    int max_iters = 5000;
    double grad_tol = 1e-8;
    std::uint64_t seed = 1;
};

// Low-rank relaxation of the bilinear form over products of unit spheres:
// projected-gradient ascent with adaptive step halving and row renormalization,
// best result over independent restarts (ties to the lower restart index).
// converged is false when no restart reached grad_tol.
VectorSolution sdp_relax(const ProblemInstance& instance, const SdpOptions& opts = {});

// Instance files: CSV (comma-separated rows, no header) or JSON
// {"m":..., "n":..., "entries": [[...], ...]}, dispatched on content.
ProblemInstance load_instance(const std::string& path);
ProblemInstance parse_instance(const std::string& text);

} // namespace krivine
