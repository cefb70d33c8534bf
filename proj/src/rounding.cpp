#include "krivine/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "krivine/errors.hpp"
#include "krivine/rng.hpp"

namespace krivine {

PartitionPair PartitionPair::builtin_sign_pair() {
    PartitionPair p;
    p.k = 1;
    p.encoding = Encoding::builtin_sign;
    return p;
}

std::string PartitionPair::pack_cell_index(const std::vector<int>& index) {
    std::string key(index.size() * sizeof(int), '\0');
    std::memcpy(key.data(), index.data(), key.size());
    return key;
}

namespace {

PartitionPair::Grid grid_from_json(const nlohmann::json& doc) {
    PartitionPair::Grid grid;
    const int k = doc.at("k").get<int>();
    grid.cell_size = doc.at("cell_size").get<double>();
    if (!(grid.cell_size > 0.0)) throw parse_error("grid partition: cell_size must be > 0");
    grid.origin = doc.at("origin").get<std::vector<double>>();
    if (static_cast<int>(grid.origin.size()) != k)
        throw parse_error("grid partition: origin must have k entries");
    grid.outside_label = doc.at("outside_label").get<int>();
    if (grid.outside_label != 1 && grid.outside_label != -1)
        throw parse_error("grid partition: outside_label must be +1 or -1");
    for (const auto& cell : doc.at("cells")) {
        std::vector<int> index = cell.at("index").get<std::vector<int>>();
        if (static_cast<int>(index.size()) != k)
            throw parse_error("grid partition: cell index must have k entries");
        const int label = cell.at("label").get<int>();
        if (label != 1 && label != -1)
            throw parse_error("grid partition: cell label must be +1 or -1");
        grid.cells[PartitionPair::pack_cell_index(index)] = label;
    }
    return grid;
}

} // namespace

PartitionPair PartitionPair::grid_from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("grid partition JSON parse error: ") + e.what());
    }
    PartitionPair p;
    try {
        p.k = doc.at("k").get<int>();
        if (p.k < 1) throw parse_error("grid partition: k must be >= 1");
        p.encoding = Encoding::grid;
        p.first = grid_from_json(doc);
        p.second = p.first;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("grid partition: ") + e.what());
    }
    return p;
}

PartitionPair PartitionPair::grid_from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open partition file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return grid_from_json_text(buffer.str());
}

int apply_partition(const PartitionPair& partition, PartitionSide side,
                    const double* point, int dim) {
    if (dim != partition.k)
        throw std::invalid_argument("apply_partition: point dimension mismatch");
    if (partition.encoding == PartitionPair::Encoding::builtin_sign) {
        if (partition.k != 1)
            throw std::invalid_argument("apply_partition: builtin sign pair requires k=1");
        return point[0] < 0.0 ? -1 : 1;  // sign(0) := +1
    }

    const PartitionPair::Grid& grid =
        side == PartitionSide::first ? partition.first : partition.second;
    std::vector<int> index(dim);
    for (int i = 0; i < dim; ++i)
        index[i] = static_cast<int>(std::floor((point[i] - grid.origin[i]) / grid.cell_size));
    const auto it = grid.cells.find(PartitionPair::pack_cell_index(index));
    return it == grid.cells.end() ? grid.outside_label : it->second;
}

std::uint64_t gaussian_matrix_stride(int k, int d) {
    const std::uint64_t entries = static_cast<std::uint64_t>(k) * d;
    return entries + (entries % 2);  // Box-Muller consumes pairs
}

Matrix sample_gaussian_matrix(int k, int d, std::uint64_t seed, std::uint64_t counter_base) {
    if (k < 1 || d < 1) throw std::invalid_argument("sample_gaussian_matrix: k, d must be >= 1");
    Matrix g(k, d);
    const std::uint64_t entries = static_cast<std::uint64_t>(k) * d;
    for (std::uint64_t p = 0; p < entries; p += 2) {
        double z0, z1;
        rng::gaussian_pair(seed, counter_base + p, z0, z1);
        g.data[p] = z0;
        if (p + 1 < entries) g.data[p + 1] = z1;
    }
    return g;
}

namespace {

// Projects all vectors of the configuration through G and reads labels.
void project_and_label(const VectorSolution& sol, const PartitionPair& partition,
                       const Matrix& G, std::vector<int>& eps, std::vector<int>& delta,
                       std::vector<double>& point) {
    const int k = G.rows;
    const int d = G.cols;
    for (int i = 0; i < sol.m(); ++i) {
        for (int r = 0; r < k; ++r) point[r] = dot(G.row(r), sol.X.row(i), d);
        eps[i] = apply_partition(partition, PartitionSide::first, point.data(), k);
    }
    for (int j = 0; j < sol.n(); ++j) {
        for (int r = 0; r < k; ++r) point[r] = dot(G.row(r), sol.Y.row(j), d);
        delta[j] = apply_partition(partition, PartitionSide::second, point.data(), k);
    }
}

} // namespace

RoundOutcome round_once(const VectorSolution& preprocessed, const PartitionPair& partition,
                        std::uint64_t seed, std::uint64_t counter_base) {
    const int d = preprocessed.dim();
    if (preprocessed.Y.cols != d)
        throw std::invalid_argument("round_once: sides have different dimensions");
    const Matrix G = sample_gaussian_matrix(partition.k, d, seed, counter_base);
    RoundOutcome out;
    out.eps.resize(preprocessed.m());
    out.delta.resize(preprocessed.n());
    std::vector<double> point(partition.k);
    project_and_label(preprocessed, partition, G, out.eps, out.delta, point);
    return out;
}

namespace {

struct ChunkStats {
    std::vector<long long> pair_sums;  // exact integer sums of eps_i*delta_j
    double obj_sum = 0.0;
    double obj_sumsq = 0.0;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<int> best_eps;
    std::vector<int> best_delta;
};

ChunkStats accumulate_chunk(const ProblemInstance& instance, const VectorSolution& sol,
                            const PartitionPair& partition, std::uint64_t chunk_seed,
                            long long n_trials) {
    const int m = sol.m();
    const int n = sol.n();
    const int d = sol.dim();
    const std::uint64_t stride = gaussian_matrix_stride(partition.k, d);

    ChunkStats stats;
    stats.pair_sums.assign(static_cast<std::size_t>(m) * n, 0);
    std::vector<int> eps(m), delta(n);
    std::vector<double> point(partition.k);
    std::vector<double> row_sums(m);

    for (long long t = 0; t < n_trials; ++t) {
        const Matrix G =
            sample_gaussian_matrix(partition.k, d, chunk_seed, static_cast<std::uint64_t>(t) * stride);
        project_and_label(sol, partition, G, eps, delta, point);

        for (int i = 0; i < m; ++i) {
            long long* sums = stats.pair_sums.data() + static_cast<std::size_t>(i) * n;
            const int e = eps[i];
            for (int j = 0; j < n; ++j) sums[j] += e * delta[j];
        }

        double S = 0.0;
        for (int i = 0; i < m; ++i) {
            const double* a = instance.A.row(i);
            double r = 0.0;
            for (int j = 0; j < n; ++j) r += a[j] * delta[j];
            row_sums[i] = r;
            S += eps[i] * r;
        }
        if (S > stats.best_value) {
            stats.best_value = S;
            stats.best_eps = eps;
            stats.best_delta = delta;
        }
        stats.obj_sum += S;
        stats.obj_sumsq += S * S;
    }
    return stats;
}

RoundingReport assemble_report(const ProblemInstance& instance, const VectorSolution& sol,
                               const KrivineScheme& scheme,
                               const std::vector<ChunkStats>& chunks, long long trials,
                               std::uint64_t seed) {
    const int m = sol.m();
    const int n = sol.n();
    RoundingReport report;
    report.trials = trials;
    report.m = m;
    report.n = n;
    report.seed = seed;
    report.per_pair_mean.assign(static_cast<std::size_t>(m) * n, 0.0);
    report.per_pair_stderr.assign(static_cast<std::size_t>(m) * n, 0.0);
    report.target_matrix.assign(static_cast<std::size_t>(m) * n, 0.0);

    std::vector<long long> pair_total(static_cast<std::size_t>(m) * n, 0);
    double obj_sum = 0.0, obj_sumsq = 0.0;
    double best_value = -std::numeric_limits<double>::infinity();
    const ChunkStats* best_chunk = nullptr;
    for (const ChunkStats& c : chunks) {
        for (std::size_t i = 0; i < pair_total.size(); ++i) pair_total[i] += c.pair_sums[i];
        obj_sum += c.obj_sum;
        obj_sumsq += c.obj_sumsq;
        if (c.best_value > best_value) {
            best_value = c.best_value;
            best_chunk = &c;
        }
    }

    const double T = static_cast<double>(trials);
    for (std::size_t i = 0; i < pair_total.size(); ++i) {
        const double mean = static_cast<double>(pair_total[i]) / T;
        report.per_pair_mean[i] = mean;
        // eps*delta is +-1, so the sample variance is (1 - mean^2) T/(T-1).
        const double var = std::max(0.0, (1.0 - mean * mean) * T / (T - 1.0));
        report.per_pair_stderr[i] = std::sqrt(var / T);
    }

    // Targets via the scheme identity: f_k(<x'_i, y'_j>) = c <x_i, y_j>.
    const int d = sol.dim();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const double tprime =
                std::clamp(dot(sol.X.row(i), sol.Y.row(j), d), -1.0, 1.0);
            report.target_matrix[static_cast<std::size_t>(i) * n + j] =
                eval_fk(scheme.fwd, tprime);
        }

    double obj_mean = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            obj_mean += instance.A.at(i, j) * report.mean(i, j);
    report.objective_mean = obj_mean;

    const double s_mean = obj_sum / T;
    const double s_var = std::max(0.0, (obj_sumsq - T * s_mean * s_mean) / (T - 1.0));
    report.objective_stderr = std::sqrt(s_var / T);

    if (best_chunk != nullptr) {
        report.best_signs.eps = best_chunk->best_eps;
        report.best_signs.delta = best_chunk->best_delta;
        report.best_signs.value =
            objective(instance, report.best_signs.eps, report.best_signs.delta);
    }
    return report;
}

void validate_expectation_args(const ProblemInstance& instance, const VectorSolution& sol,
                               const PartitionPair& partition, long long trials) {
    if (instance.m() != sol.m() || instance.n() != sol.n())
        throw std::invalid_argument("rounding_expectation: instance/solution shape mismatch");
    if (sol.X.cols != sol.Y.cols)
        throw std::invalid_argument("rounding_expectation: sides have different dimensions");
    if (trials < 1000)
        throw std::invalid_argument("rounding_expectation: trials must be >= 1000");
    (void)partition;
}

} // namespace

RoundingReport rounding_expectation(const ProblemInstance& instance,
                                    const VectorSolution& preprocessed,
                                    const KrivineScheme& scheme,
                                    const PartitionPair& partition, long long trials,
                                    std::uint64_t seed) {
    validate_expectation_args(instance, preprocessed, partition, trials);
    const long long n_chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<ChunkStats> chunks(n_chunks);
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < n_chunks; ++c) {
        const long long n_trials = std::min(kTrialsPerChunk, trials - c * kTrialsPerChunk);
        chunks[c] = accumulate_chunk(instance, preprocessed, partition,
                                     rng::substream(seed, static_cast<std::uint64_t>(c)),
                                     n_trials);
    }
    return assemble_report(instance, preprocessed, scheme, chunks, trials, seed);
}

RoundingReport rounding_expectation_serial(const ProblemInstance& instance,
                                           const VectorSolution& preprocessed,
                                           const KrivineScheme& scheme,
                                           const PartitionPair& partition, long long trials,
                                           std::uint64_t seed) {
    validate_expectation_args(instance, preprocessed, partition, trials);
    const long long n_chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<ChunkStats> chunks(n_chunks);
    for (long long c = 0; c < n_chunks; ++c) {
        const long long n_trials = std::min(kTrialsPerChunk, trials - c * kTrialsPerChunk);
        chunks[c] = accumulate_chunk(instance, preprocessed, partition,
                                     rng::substream(seed, static_cast<std::uint64_t>(c)),
                                     n_trials);
    }
    return assemble_report(instance, preprocessed, scheme, chunks, trials, seed);
}

} // namespace krivine
