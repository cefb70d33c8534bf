#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krivine/embedding.hpp"
#include "krivine/problems.hpp"
#include "krivine/rounding.hpp"
#include "krivine/series.hpp"

namespace krivine {

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long long samples = 0;
    std::uint64_t seed = 0;
};

inline constexpr long long kSamplesPerChunk = 8192;

// Monte Carlo estimate of the defining Gaussian expectation of f_k(t):
// draws i.i.d. standard Gaussian pairs (G1, G2) in R^k and averages
// <G1/|G1|, (t G1 + sqrt(1-t^2) G2)/|t G1 + sqrt(1-t^2) G2|>. Samples whose
// norms underflow 1e-300 are redrawn. Chunked substreams exactly as in the
// rounding module; serial reference shares the per-chunk kernel.
McEstimate mc_estimate_fk(int k, double t, long long samples, std::uint64_t seed);
McEstimate mc_estimate_fk_serial(int k, double t, long long samples, std::uint64_t seed);

// Z-scores of the empirical pair correlations against the scheme targets:
// z_ij = (per_pair_mean - c <x_i, y_j>) / per_pair_stderr. The configuration
// overload uses the given unit vectors; the instance overload first solves
// the relaxation.
Matrix verify_scheme_identity(const VectorSolution& configuration,
                              const KrivineScheme& scheme, const PartitionPair& partition,
                              long long trials, std::uint64_t seed);

Matrix verify_scheme_identity(const ProblemInstance& instance, const KrivineScheme& scheme,
                              const PartitionPair& partition, long long trials,
                              std::uint64_t seed, const SdpOptions& sdp_opts = {});

struct TrendRow {
    int k = 0;
    bool ok = false;
    std::string error;
    double c = 0.0;
    double overhead = 0.0;
    double scaled_gap = 0.0;  // k * (1 - c)
    double C_used = 0.0;
    double target = 0.0;
    double radius_estimate = 0.0;
    double equation_residual = 0.0;
    int n_terms = 0;
    int n_inv = 0;
};

// One row per k in [k_min, k_max] stepping by stride; failures are recorded
// in the row, not thrown.
std::vector<TrendRow> quality_trend(int k_min, int k_max, SchemeMode mode, int stride = 1,
                                    std::optional<double> C_override = std::nullopt);

std::string trend_to_csv(const std::vector<TrendRow>& rows);

} // namespace krivine
