#include "krivine/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "krivine/errors.hpp"
#include "krivine/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace krivine {

double objective(const ProblemInstance& instance, const std::vector<int>& eps,
                 const std::vector<int>& delta) {
    const int m = instance.m();
    const int n = instance.n();
    if (static_cast<int>(eps.size()) != m || static_cast<int>(delta.size()) != n)
        throw std::invalid_argument("objective: sign vector dimension mismatch");
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        const double* a = instance.A.row(i);
        for (int j = 0; j < n; ++j) row += a[j] * delta[j];
        total += eps[i] * row;
    }
    return total;
}

double vector_objective(const ProblemInstance& instance, const VectorSolution& solution) {
    if (solution.m() != instance.m() || solution.n() != instance.n())
        throw std::invalid_argument("vector_objective: solution shape mismatch");
    const int d = solution.dim();
    double total = 0.0;
    for (int i = 0; i < instance.m(); ++i) {
        const double* a = instance.A.row(i);
        for (int j = 0; j < instance.n(); ++j)
            total += a[j] * dot(solution.X.row(i), solution.Y.row(j), d);
    }
    return total;
}

namespace {

// Enumerates eps over {-1,+1}^m in Gray-code order starting from all +1,
// keeping column sums s_j = sum_i a_ij eps_i updated incrementally.
SignAssignment brute_force_rows(const Matrix& A) {
    const int m = A.rows;
    const int n = A.cols;
    std::vector<int> eps(m, 1);
    std::vector<double> s(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) s[j] += A.at(i, j);

    auto column_value = [&]() {
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += std::fabs(s[j]);
        return v;
    };

    double best = column_value();
    std::vector<int> best_eps = eps;

    const std::uint64_t total = 1ull << m;
    for (std::uint64_t t = 1; t < total; ++t) {
        const int i = std::countr_zero(t);
        for (int j = 0; j < n; ++j) s[j] -= 2.0 * eps[i] * A.at(i, j);
        eps[i] = -eps[i];
        const double v = column_value();
        if (v > best) {
            best = v;
            best_eps = eps;
        }
    }

    SignAssignment out;
    out.eps = std::move(best_eps);
    out.delta.assign(n, 1);
    for (int j = 0; j < n; ++j) {
        double col = 0.0;
        for (int i = 0; i < m; ++i) col += A.at(i, j) * out.eps[i];
        out.delta[j] = col < 0.0 ? -1 : 1;
    }
    return out;
}

} // namespace

SignAssignment brute_force_opt(const ProblemInstance& instance) {
    const int m = instance.m();
    const int n = instance.n();
    if (m < 1 || n < 1) throw std::invalid_argument("brute_force_opt: empty instance");
    if (std::min(m, n) > kBruteForceSideLimit)
        throw std::invalid_argument("brute_force_opt: instance too large (min side > 24)");

    SignAssignment out;
    if (m <= n) {
        out = brute_force_rows(instance.A);
    } else {
        SignAssignment t = brute_force_rows(transpose(instance.A));
        out.eps = std::move(t.delta);
        out.delta = std::move(t.eps);
    }
    out.value = objective(instance, out.eps, out.delta);
    return out;
}

namespace {

Matrix random_unit_rows(int rows, int cols, std::uint64_t seed) {
    Matrix mat(rows, cols);
    for (int i = 0; i < rows; ++i) {
        double* r = mat.row(i);
        for (int j = 0; j < cols; ++j)
            r[j] = rng::gaussian_at(seed, static_cast<std::uint64_t>(i) * cols + j);
        const double norm = norm2(r, cols);
        if (norm > 0.0)
            for (int j = 0; j < cols; ++j) r[j] /= norm;
        else
            r[0] = 1.0;
    }
    return mat;
}

struct AscentResult {
    Matrix X, Y;
    double value = 0.0;
    bool converged = false;
};

AscentResult ascend(const ProblemInstance& instance, int rank, int max_iters,
                    double grad_tol, std::uint64_t seed) {
    const int m = instance.m();
    const int n = instance.n();
    Matrix X = random_unit_rows(m, rank, rng::substream(seed, 0x58));
    Matrix Y = random_unit_rows(n, rank, rng::substream(seed, 0x59));

    const Matrix At = transpose(instance.A);
    auto value_of = [&](const Matrix& Xm, const Matrix& Ym) {
        Matrix AY = matmul(instance.A, Ym);
        double v = 0.0;
        for (int i = 0; i < m; ++i) v += dot(Xm.row(i), AY.row(i), rank);
        return v;
    };

    double value = value_of(X, Y);
    double step = 0.5;
    bool converged = false;

    for (int iter = 0; iter < max_iters; ++iter) {
        Matrix GX = matmul(instance.A, Y);   // gradient wrt rows of X
        Matrix GY = matmul(At, X);           // gradient wrt rows of Y

        // Riemannian gradient norm: tangential component per row.
        double grad_norm = 0.0;
        for (int i = 0; i < m; ++i) {
            const double radial = dot(GX.row(i), X.row(i), rank);
            double sq = 0.0;
            for (int j = 0; j < rank; ++j) {
                const double g = GX.at(i, j) - radial * X.at(i, j);
                sq += g * g;
            }
            grad_norm = std::max(grad_norm, std::sqrt(sq));
        }
        for (int i = 0; i < n; ++i) {
            const double radial = dot(GY.row(i), Y.row(i), rank);
            double sq = 0.0;
            for (int j = 0; j < rank; ++j) {
                const double g = GY.at(i, j) - radial * Y.at(i, j);
                sq += g * g;
            }
            grad_norm = std::max(grad_norm, std::sqrt(sq));
        }
        if (grad_norm <= grad_tol) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (step >= 1e-12) {
            Matrix Xc = X;
            Matrix Yc = Y;
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < rank; ++j) Xc.at(i, j) += step * GX.at(i, j);
                const double norm = norm2(Xc.row(i), rank);
                if (norm > 0.0)
                    for (int j = 0; j < rank; ++j) Xc.at(i, j) /= norm;
            }
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < rank; ++j) Yc.at(i, j) += step * GY.at(i, j);
                const double norm = norm2(Yc.row(i), rank);
                if (norm > 0.0)
                    for (int j = 0; j < rank; ++j) Yc.at(i, j) /= norm;
            }
            const double candidate = value_of(Xc, Yc);
            if (candidate > value) {
                X = std::move(Xc);
                Y = std::move(Yc);
                value = candidate;
                step = std::min(step * 1.25, 1.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no improving step at any scale
    }

    return {std::move(X), std::move(Y), value, converged};
}

} // namespace

VectorSolution sdp_relax(const ProblemInstance& instance, const SdpOptions& opts) {
    const int m = instance.m();
    const int n = instance.n();
    if (m < 1 || n < 1) throw std::invalid_argument("sdp_relax: empty instance");
    const int rank = opts.rank > 0 ? opts.rank : std::min(m + n, 20);
    if (rank < 2) throw std::invalid_argument("sdp_relax: rank must be >= 2");
    const int restarts = std::max(1, opts.restarts);

    std::vector<AscentResult> results(restarts);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < restarts; ++r)
        results[r] = ascend(instance, rank, opts.max_iters, opts.grad_tol,
                            rng::substream(opts.seed, static_cast<std::uint64_t>(r)));

    int best = 0;
    for (int r = 1; r < restarts; ++r)
        if (results[r].value > results[best].value) best = r;

    VectorSolution out;
    out.X = std::move(results[best].X);
    out.Y = std::move(results[best].Y);
    out.value = results[best].value;
    out.converged = false;
    for (const AscentResult& r : results) out.converged = out.converged || r.converged;
    return out;
}

namespace {

ProblemInstance parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                if (!std::isfinite(v)) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw parse_error("CSV parse error at line " + std::to_string(lineno) +
                                  ": bad cell '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw parse_error("CSV parse error at line " + std::to_string(lineno) +
                              ": ragged row (expected " +
                              std::to_string(rows.front().size()) + " cells)");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty())
        throw parse_error("CSV parse error: empty matrix");

    ProblemInstance instance;
    instance.A = Matrix(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < instance.m(); ++i)
        for (int j = 0; j < instance.n(); ++j) instance.A.at(i, j) = rows[i][j];
    return instance;
}

ProblemInstance parse_json(const std::string& text) {
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        if (!doc.contains("m") || !doc.contains("n") || !doc.contains("entries"))
            throw parse_error("JSON instance must have fields m, n, entries");
        const int m = doc["m"].get<int>();
        const int n = doc["n"].get<int>();
        if (m < 1 || n < 1) throw parse_error("JSON instance: m and n must be positive");
        const auto& entries = doc["entries"];
        if (!entries.is_array() || static_cast<int>(entries.size()) != m)
            throw parse_error("JSON instance: entries must be an m-row array");

        ProblemInstance instance;
        instance.A = Matrix(m, n);
        for (int i = 0; i < m; ++i) {
            const auto& row = entries[i];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw parse_error("JSON instance: row " + std::to_string(i) +
                                  " must have n entries");
            for (int j = 0; j < n; ++j) {
                const double v = row[j].get<double>();
                if (!std::isfinite(v))
                    throw parse_error("JSON instance: non-finite entry at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
                instance.A.at(i, j) = v;
            }
        }
        return instance;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("JSON instance error: ") + e.what());
    }
}

} // namespace

ProblemInstance parse_instance(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw parse_error("empty instance file");
    return text[first] == '{' ? parse_json(text) : parse_csv(text);
}

ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open instance file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

} // namespace krivine
