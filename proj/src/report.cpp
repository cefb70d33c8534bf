#include "krivine/report.hpp"

namespace krivine {

using nlohmann::json;

json report_envelope(const std::string& command, const json& config) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["version"] = kLibraryVersion;
    doc["command"] = command;
    doc["config"] = config;
    return doc;
}

json to_json(const CoefficientTable& table) {
    return json{{"k", table.k},
                {"N", table.trunc_index()},
                {"a", table.a},
                {"tail_bound", table.tail_bound},
                {"coefficient_sum", table.coefficient_sum()}};
}

json to_json(const InverseTable& inv) {
    return json{{"k", inv.k},
                {"N", inv.trunc_index()},
                {"b", inv.b},
                {"radius_estimate", inv.radius_estimate}};
}

json to_json(const KrivineScheme& scheme) {
    return json{{"k", scheme.k},
                {"mode", to_string(scheme.mode)},
                {"C_value", scheme.C_value},
                {"target", scheme.target},
                {"c", scheme.c},
                {"overhead", scheme.overhead},
                {"padding", scheme.padding()},
                {"equation_residual", scheme.equation_residual},
                {"truncation_bound", scheme.truncation_bound},
                {"n_terms", scheme.fwd.trunc_index()},
                {"tail_bound", scheme.fwd.tail_bound},
                {"n_inv", scheme.inv.trunc_index()},
                {"radius_estimate", scheme.inv.radius_estimate}};
}

json to_json(const SignAssignment& signs) {
    return json{{"eps", signs.eps}, {"delta", signs.delta}, {"value", signs.value}};
}

json to_json(const RoundingReport& report) {
    auto matrix_rows = [&](const std::vector<double>& flat) {
        json rows = json::array();
        for (int i = 0; i < report.m; ++i) {
            json row = json::array();
            for (int j = 0; j < report.n; ++j) row.push_back(flat[i * report.n + j]);
            rows.push_back(std::move(row));
        }
        return rows;
    };
    return json{{"trials", report.trials},
                {"m", report.m},
                {"n", report.n},
                {"seed", report.seed},
                {"per_pair_mean", matrix_rows(report.per_pair_mean)},
                {"per_pair_stderr", matrix_rows(report.per_pair_stderr)},
                {"target_matrix", matrix_rows(report.target_matrix)},
                {"objective_mean", report.objective_mean},
                {"objective_stderr", report.objective_stderr},
                {"best_signs", to_json(report.best_signs)}};
}

json to_json(const McEstimate& est) {
    return json{{"value", est.value},
                {"stderr", est.stderr_},
                {"samples", est.samples},
                {"seed", est.seed}};
}

json to_json(const TrendRow& row) {
    json j{{"k", row.k}, {"ok", row.ok}};
    if (row.ok) {
        j["c"] = row.c;
        j["overhead"] = row.overhead;
        j["scaled_gap"] = row.scaled_gap;
        j["C_used"] = row.C_used;
        j["target"] = row.target;
        j["radius_estimate"] = row.radius_estimate;
        j["equation_residual"] = row.equation_residual;
        j["n_terms"] = row.n_terms;
        j["n_inv"] = row.n_inv;
    } else {
        j["error"] = row.error;
    }
    return j;
}

json to_json(const std::vector<TrendRow>& rows) {
    json arr = json::array();
    for (const TrendRow& row : rows) arr.push_back(to_json(row));
    return arr;
}

json matrix_to_json(const Matrix& mat) {
    json rows = json::array();
    for (int i = 0; i < mat.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < mat.cols; ++j) row.push_back(mat.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace krivine
