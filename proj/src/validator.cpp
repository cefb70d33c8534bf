#include "krivine/validator.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "krivine/errors.hpp"
#include "krivine/rng.hpp"

namespace krivine {

namespace {

struct McChunk {
    double sum = 0.0;
    double sumsq = 0.0;
};

// Counter layout: each sample owns a block of 64 retry slots so that the
// measure-zero redraw guard cannot desynchronize neighbouring samples.
McChunk mc_chunk(int k, double t, std::uint64_t chunk_seed, long long n_samples) {
    const double comp = std::sqrt(std::max(0.0, 1.0 - t * t));
    const std::uint64_t draw = 2 * static_cast<std::uint64_t>(k);
    const std::uint64_t sample_stride = (draw + draw % 2) * 64;

    std::vector<double> g1(k), g2(k);
    McChunk out;
    for (long long s = 0; s < n_samples; ++s) {
        const std::uint64_t base = static_cast<std::uint64_t>(s) * sample_stride;
        double value = 0.0;
        bool ok = false;
        for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
            const std::uint64_t at = base + attempt * (draw + draw % 2);
            for (int i = 0; i < k; ++i) g1[i] = rng::gaussian_at(chunk_seed, at + i);
            for (int i = 0; i < k; ++i) g2[i] = rng::gaussian_at(chunk_seed, at + k + i);
            double n1 = 0.0, nv = 0.0, cross = 0.0;
            for (int i = 0; i < k; ++i) {
                const double v = t * g1[i] + comp * g2[i];
                n1 += g1[i] * g1[i];
                nv += v * v;
                cross += g1[i] * v;
            }
            n1 = std::sqrt(n1);
            nv = std::sqrt(nv);
            if (n1 < 1e-300 || nv < 1e-300) continue;  // redraw
            value = cross / (n1 * nv);
            ok = true;
        }
        if (!ok) throw numeric_error("mc_estimate_fk: repeated norm underflow");
        out.sum += value;
        out.sumsq += value * value;
    }
    return out;
}

McEstimate mc_reduce(const std::vector<McChunk>& chunks, long long samples,
                     std::uint64_t seed) {
    double sum = 0.0, sumsq = 0.0;
    for (const McChunk& c : chunks) {
        sum += c.sum;
        sumsq += c.sumsq;
    }
    const double N = static_cast<double>(samples);
    McEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.value = sum / N;
    const double var = std::max(0.0, (sumsq - N * est.value * est.value) / (N - 1.0));
    est.stderr_ = std::sqrt(var / N);
    return est;
}

void validate_mc_args(int k, double t, long long samples) {
    if (k < 1) throw std::invalid_argument("mc_estimate_fk: k must be >= 1");
    if (!(std::fabs(t) <= 1.0)) throw std::invalid_argument("mc_estimate_fk: |t| must be <= 1");
    if (samples < 10000)
        throw std::invalid_argument("mc_estimate_fk: samples must be >= 10^4");
}

} // namespace

McEstimate mc_estimate_fk(int k, double t, long long samples, std::uint64_t seed) {
    validate_mc_args(k, t, samples);
    const long long n_chunks = (samples + kSamplesPerChunk - 1) / kSamplesPerChunk;
    std::vector<McChunk> chunks(n_chunks);
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < n_chunks; ++c) {
        const long long n = std::min(kSamplesPerChunk, samples - c * kSamplesPerChunk);
        chunks[c] = mc_chunk(k, t, rng::substream(seed, static_cast<std::uint64_t>(c)), n);
    }
    return mc_reduce(chunks, samples, seed);
}

McEstimate mc_estimate_fk_serial(int k, double t, long long samples, std::uint64_t seed) {
    validate_mc_args(k, t, samples);
    const long long n_chunks = (samples + kSamplesPerChunk - 1) / kSamplesPerChunk;
    std::vector<McChunk> chunks(n_chunks);
    for (long long c = 0; c < n_chunks; ++c) {
        const long long n = std::min(kSamplesPerChunk, samples - c * kSamplesPerChunk);
        chunks[c] = mc_chunk(k, t, rng::substream(seed, static_cast<std::uint64_t>(c)), n);
    }
    return mc_reduce(chunks, samples, seed);
}

Matrix verify_scheme_identity(const VectorSolution& configuration,
                              const KrivineScheme& scheme, const PartitionPair& partition,
                              long long trials, std::uint64_t seed) {
    ProblemInstance zero;
    zero.A = Matrix(configuration.m(), configuration.n());
    VectorSolution pre = preprocess(configuration, scheme);
    RoundingReport report =
        rounding_expectation(zero, pre, scheme, partition, trials, seed);

    Matrix z(report.m, report.n);
    for (int i = 0; i < report.m; ++i)
        for (int j = 0; j < report.n; ++j) {
            const double gap = report.mean(i, j) - report.target(i, j);
            const double se = report.stderr_of(i, j);
            if (se > 0.0)
                z.at(i, j) = gap / se;
            else
                z.at(i, j) = gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
    return z;
}

Matrix verify_scheme_identity(const ProblemInstance& instance, const KrivineScheme& scheme,
                              const PartitionPair& partition, long long trials,
                              std::uint64_t seed, const SdpOptions& sdp_opts) {
    VectorSolution solution = sdp_relax(instance, sdp_opts);
    return verify_scheme_identity(solution, scheme, partition, trials, seed);
}

std::vector<TrendRow> quality_trend(int k_min, int k_max, SchemeMode mode, int stride,
                                    std::optional<double> C_override) {
    if (k_min < 1 || k_max < k_min)
        throw std::invalid_argument("quality_trend: need 1 <= k_min <= k_max");
    if (stride < 1) throw std::invalid_argument("quality_trend: stride must be >= 1");

    std::vector<TrendRow> rows;
    for (int k = k_min; k <= k_max; k += stride) {
        TrendRow row;
        row.k = k;
        try {
            KrivineScheme s = build_scheme(k, mode, C_override);
            row.ok = true;
            row.c = s.c;
            row.overhead = s.overhead;
            row.scaled_gap = k * (1.0 - s.c);
            row.C_used = s.C_value;
            row.target = s.target;
            row.radius_estimate = s.inv.radius_estimate;
            row.equation_residual = s.equation_residual;
            row.n_terms = s.fwd.trunc_index();
            row.n_inv = s.inv.trunc_index();
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string trend_to_csv(const std::vector<TrendRow>& rows) {
    std::ostringstream out;
    out << "k,ok,c,overhead,scaled_gap,C_used,target,radius_estimate,equation_residual,"
           "n_terms,n_inv,error\n";
    out.precision(17);
    for (const TrendRow& r : rows) {
        out << r.k << ',' << (r.ok ? 1 : 0) << ',' << r.c << ',' << r.overhead << ','
            << r.scaled_gap << ',' << r.C_used << ',' << r.target << ','
            << r.radius_estimate << ',' << r.equation_residual << ',' << r.n_terms << ','
            << r.n_inv << ',' << r.error << '\n';
    }
    return out.str();
}

} // namespace krivine
