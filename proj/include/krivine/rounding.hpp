#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "krivine/embedding.hpp"
#include "krivine/linalg.hpp"
#include "krivine/problems.hpp"
#include "krivine/series.hpp"

namespace krivine {

enum class PartitionSide { first, second };

// A pair of total {-1,+1} labelings of R^k. builtin_sign is the classical
// one-dimensional pair (sign, sign); grid partitions label axis-aligned
// hypercube cells, everything outside the listed cells getting
// outside_label. A flat grid file defines the same labeling for both sides.
struct PartitionPair {
    enum class Encoding { builtin_sign, grid };

    int k = 1;
    Encoding encoding = Encoding::builtin_sign;

    struct Grid {
        double cell_size = 1.0;
        std::vector<double> origin;
        std::unordered_map<std::string, int> cells;  // packed index -> label
        int outside_label = 1;
    };
    Grid first;
    Grid second;

    static PartitionPair builtin_sign_pair();
    static PartitionPair grid_from_json_text(const std::string& text);
    static PartitionPair grid_from_file(const std::string& path);

    static std::string pack_cell_index(const std::vector<int>& index);
};

// Label of `point` under one side of the pair. builtin_sign returns the sign
// of the single coordinate with sign(0) := +1.
int apply_partition(const PartitionPair& partition, PartitionSide side,
                    const double* point, int dim);

// k x d matrix of i.i.d. standard normals, deterministic in (seed, counter
// stream); entry (i,j) is draw i*d+j.
Matrix sample_gaussian_matrix(int k, int d, std::uint64_t seed,
                              std::uint64_t counter_base = 0);

// Uniform-counter stride consumed by one k x d Gaussian matrix.
std::uint64_t gaussian_matrix_stride(int k, int d);

struct RoundOutcome {
    std::vector<int> eps;    // m signs
    std::vector<int> delta;  // n signs
};

// One rounding trial: sample G, project both sides, read labels.
RoundOutcome round_once(const VectorSolution& preprocessed, const PartitionPair& partition,
                        std::uint64_t seed, std::uint64_t counter_base = 0);

struct RoundingReport {
    long long trials = 0;
    int m = 0;
    int n = 0;
    std::vector<double> per_pair_mean;    // row-major m x n
    std::vector<double> per_pair_stderr;  // row-major m x n
    std::vector<double> target_matrix;    // c * <x_i, y_j> (original correlations)
    double objective_mean = 0.0;
    double objective_stderr = 0.0;
    std::uint64_t seed = 0;
    SignAssignment best_signs;  // highest observed objective across trials

    double mean(int i, int j) const { return per_pair_mean[i * n + j]; }
    double stderr_of(int i, int j) const { return per_pair_stderr[i * n + j]; }
    double target(int i, int j) const { return target_matrix[i * n + j]; }
};

inline constexpr long long kTrialsPerChunk = 1024;

// Monte Carlo estimate of E[eps_i delta_j] over `trials` rounding trials.
// Trials are chunked deterministically: chunk c draws from the substream
// derived from (seed, c), and chunk partials merge in chunk order, so the
// report is bit-identical for a fixed seed regardless of thread count.
// The parallel driver and the serial reference share the per-chunk kernel.
RoundingReport rounding_expectation(const ProblemInstance& instance,
                                    const VectorSolution& preprocessed,
                                    const KrivineScheme& scheme,
                                    const PartitionPair& partition, long long trials,
                                    std::uint64_t seed);

RoundingReport rounding_expectation_serial(const ProblemInstance& instance,
                                           const VectorSolution& preprocessed,
                                           const KrivineScheme& scheme,
                                           const PartitionPair& partition, long long trials,
                                           std::uint64_t seed);

} // namespace krivine
