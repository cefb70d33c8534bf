// Command-line surface for the Krivine rounding-scheme library: series
// tables, scheme constants, quality trends, Monte Carlo checks of f_k, the
// end-to-end rounding pipeline, the brute-force sign oracle, and scheme
// identity validation. All reports are JSON (CSV for trend tables on
// request) and fully determined by the echoed configuration.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "krivine/embedding.hpp"
#include "krivine/errors.hpp"
#include "krivine/problems.hpp"
#include "krivine/report.hpp"
#include "krivine/rng.hpp"
#include "krivine/rounding.hpp"
#include "krivine/series.hpp"
#include "krivine/validator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 0x4B524956;  // fixed for reproducibility

struct CommonOpts {
    int k = 1;
    bool k_explicit = false;
    std::string mode = "sharp";
    std::optional<double> c_const;
    double tail_tol = krivine::kDefaultTailTol;
    long long trials = 100000;
    long long samples = 1000000;
    std::uint64_t seed = kDefaultSeed;
    int rank = -1;
    int restarts = 5;
    std::string input_path;
    std::string output_path;
    std::string format = "json";
    int workers = 0;
    std::string partition_path;
};

void emit(const CommonOpts& opts, const std::string& text) {
    if (opts.output_path.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(opts.output_path, std::ios::binary);
    if (!out) throw krivine::parse_error("cannot open output file: " + opts.output_path);
    out << text << '\n';
}

void emit_json(const CommonOpts& opts, const json& doc) { emit(opts, doc.dump(2)); }

void apply_workers(const CommonOpts& opts) {
#ifdef _OPENMP
    if (opts.workers > 0) omp_set_num_threads(opts.workers);
#else
    (void)opts;
#endif
}

json config_echo(const CommonOpts& opts) {
    json cfg{{"k", opts.k},
             {"mode", opts.mode},
             {"tail_tol", opts.tail_tol},
             {"seed", opts.seed},
             {"workers", opts.workers}};
    if (opts.c_const) cfg["C_override"] = *opts.c_const;
    if (!opts.input_path.empty()) cfg["input"] = opts.input_path;
    if (!opts.partition_path.empty()) cfg["partition"] = opts.partition_path;
    return cfg;
}

krivine::PartitionPair load_partition(const CommonOpts& opts) {
    if (opts.partition_path.empty()) {
        if (opts.k != 1)
            throw krivine::numeric_error(
                "constructive rounding requires k=1 (builtin sign) or --partition");
        return krivine::PartitionPair::builtin_sign_pair();
    }
    krivine::PartitionPair p = krivine::PartitionPair::grid_from_file(opts.partition_path);
    // the partition file carries its own dimension; an explicit --k must agree
    if (opts.k_explicit && p.k != opts.k)
        throw krivine::parse_error("partition dimension does not match --k");
    return p;
}

int cmd_coeffs(const CommonOpts& opts) {
    krivine::CoefficientTable table = krivine::compute_a_coefficients(opts.k, opts.tail_tol);
    krivine::InverseTable inv =
        krivine::invert_odd_series(table, std::min(160, table.trunc_index()));
    json doc = krivine::report_envelope("coeffs", config_echo(opts));
    doc["coefficient_table"] = krivine::to_json(table);
    doc["inverse_table"] = krivine::to_json(inv);
    emit_json(opts, doc);
    return 0;
}

int cmd_scheme(const CommonOpts& opts) {
    krivine::SchemeOptions sopts;
    sopts.tail_tol = opts.tail_tol;
    krivine::KrivineScheme scheme = krivine::build_scheme(
        opts.k, krivine::scheme_mode_from_string(opts.mode), opts.c_const, sopts);
    json doc = krivine::report_envelope("scheme", config_echo(opts));
    doc["scheme"] = krivine::to_json(scheme);
    emit_json(opts, doc);
    return 0;
}

int cmd_trend(const CommonOpts& opts, int k_min, int k_max, int stride) {
    auto rows = krivine::quality_trend(k_min, k_max,
                                       krivine::scheme_mode_from_string(opts.mode), stride,
                                       opts.c_const);
    if (opts.format == "csv") {
        emit(opts, krivine::trend_to_csv(rows));
        return 0;
    }
    json cfg = config_echo(opts);
    cfg["k_min"] = k_min;
    cfg["k_max"] = k_max;
    cfg["stride"] = stride;
    json doc = krivine::report_envelope("trend", cfg);
    doc["rows"] = krivine::to_json(rows);
    emit_json(opts, doc);
    return 0;
}

int cmd_fk_mc(const CommonOpts& opts, std::optional<double> t_single) {
    apply_workers(opts);
    krivine::CoefficientTable table = krivine::compute_a_coefficients(opts.k, opts.tail_tol);
    std::vector<double> ts;
    if (t_single)
        ts.push_back(*t_single);
    else
        for (int i = 1; i <= 9; ++i) ts.push_back(0.1 * i);

    json cells = json::array();
    for (double t : ts) {
        krivine::McEstimate est = krivine::mc_estimate_fk(opts.k, t, opts.samples, opts.seed);
        const double series = krivine::eval_fk(table, t);
        const double z = est.stderr_ > 0.0 ? (est.value - series) / est.stderr_ : 0.0;
        cells.push_back(json{{"t", t},
                             {"mc", krivine::to_json(est)},
                             {"series", series},
                             {"z", z}});
    }
    json cfg = config_echo(opts);
    cfg["samples"] = opts.samples;
    json doc = krivine::report_envelope("fk-mc", cfg);
    doc["cells"] = cells;
    emit_json(opts, doc);
    return 0;
}

int cmd_round(const CommonOpts& opts) {
    apply_workers(opts);
    if (opts.input_path.empty()) throw krivine::parse_error("round requires --input");
    krivine::ProblemInstance instance = krivine::load_instance(opts.input_path);
    krivine::PartitionPair partition = load_partition(opts);

    krivine::KrivineScheme scheme =
        krivine::build_scheme(partition.k, krivine::scheme_mode_from_string(opts.mode),
                              opts.c_const);

    krivine::SdpOptions sdp;
    sdp.rank = opts.rank;
    sdp.restarts = opts.restarts;
    sdp.seed = krivine::rng::substream(opts.seed, 0x5D9);
    krivine::VectorSolution relaxed = krivine::sdp_relax(instance, sdp);
    krivine::VectorSolution pre = krivine::preprocess(relaxed, scheme);
    krivine::RoundingReport report = krivine::rounding_expectation(
        instance, pre, scheme, partition, opts.trials, opts.seed);

    const double target_objective = scheme.c * relaxed.value;
    const double z = report.objective_stderr > 0.0
                         ? (report.objective_mean - target_objective) / report.objective_stderr
                         : 0.0;

    json cfg = config_echo(opts);
    cfg["trials"] = opts.trials;
    cfg["rank"] = sdp.rank;
    cfg["restarts"] = sdp.restarts;
    json doc = krivine::report_envelope("round", cfg);
    doc["scheme"] = krivine::to_json(scheme);
    doc["relaxation"] = json{{"value", relaxed.value},
                             {"converged", relaxed.converged},
                             {"dim", relaxed.dim()}};
    doc["rounding"] = krivine::to_json(report);
    doc["comparison"] = json{{"target_objective", target_objective},
                             {"objective_mean", report.objective_mean},
                             {"objective_stderr", report.objective_stderr},
                             {"z", z}};
    emit_json(opts, doc);
    return 0;
}

int cmd_bruteforce(const CommonOpts& opts) {
    if (opts.input_path.empty()) throw krivine::parse_error("bruteforce requires --input");
    krivine::ProblemInstance instance = krivine::load_instance(opts.input_path);
    krivine::SignAssignment best = krivine::brute_force_opt(instance);
    json cfg = config_echo(opts);
    json doc = krivine::report_envelope("bruteforce", cfg);
    doc["m"] = instance.m();
    doc["n"] = instance.n();
    doc["best"] = krivine::to_json(best);
    emit_json(opts, doc);
    return 0;
}

int cmd_validate(const CommonOpts& opts) {
    apply_workers(opts);
    if (opts.input_path.empty()) throw krivine::parse_error("validate requires --input");
    krivine::ProblemInstance instance = krivine::load_instance(opts.input_path);
    krivine::PartitionPair partition = load_partition(opts);
    krivine::KrivineScheme scheme =
        krivine::build_scheme(partition.k, krivine::scheme_mode_from_string(opts.mode),
                              opts.c_const);

    krivine::SdpOptions sdp;
    sdp.rank = opts.rank;
    sdp.restarts = opts.restarts;
    sdp.seed = krivine::rng::substream(opts.seed, 0x5D9);
    krivine::Matrix z = krivine::verify_scheme_identity(instance, scheme, partition,
                                                        opts.trials, opts.seed, sdp);

    double max_abs_z = 0.0;
    for (double v : z.data) max_abs_z = std::max(max_abs_z, std::fabs(v));
    const bool constructive =
        partition.encoding == krivine::PartitionPair::Encoding::builtin_sign;
    const bool pass = max_abs_z <= 4.0;

    json cfg = config_echo(opts);
    cfg["trials"] = opts.trials;
    json doc = krivine::report_envelope("validate", cfg);
    doc["z_scores"] = krivine::matrix_to_json(z);
    doc["max_abs_z"] = max_abs_z;
    doc["constructive"] = constructive;
    if (constructive) doc["pass"] = pass;
    emit_json(opts, doc);
    if (constructive && !pass) return 2;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Krivine rounding schemes: series constants, Gram embeddings, "
                 "randomized rounding, and Monte Carlo verification"};
    app.require_subcommand(1);

    CommonOpts opts;
    int k_min = 1, k_max = 64, stride = 1;
    std::optional<double> t_single;

    auto add_common = [&](CLI::App* cmd, bool with_k = true) {
        if (with_k) cmd->add_option("--k", opts.k, "partition dimension k")->check(CLI::PositiveNumber);
        cmd->add_option("--mode", opts.mode, "scheme mode: sharp or paper")
            ->check(CLI::IsMember({"sharp", "paper"}));
        cmd->add_option("--c-const", opts.c_const, "override the universal constant C");
        cmd->add_option("--tail-tol", opts.tail_tol, "coefficient tail tolerance")
            ->check(CLI::Range(1e-300, 1e-4));
        cmd->add_option("--seed", opts.seed, "RNG seed");
        cmd->add_option("--output", opts.output_path, "write report to file");
        cmd->add_option("--format", opts.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--workers", opts.workers, "worker thread count (0 = default)");
    };

    CLI::App* coeffs = app.add_subcommand("coeffs", "series coefficients and inverse table");
    add_common(coeffs);

    CLI::App* scheme = app.add_subcommand("scheme", "build a scheme and solve for c_k");
    add_common(scheme);

    CLI::App* trend = app.add_subcommand("trend", "c_k quality trend over a range of k");
    add_common(trend, false);
    trend->add_option("--k-min", k_min, "lowest k")->check(CLI::PositiveNumber);
    trend->add_option("--k-max", k_max, "highest k")->check(CLI::PositiveNumber);
    trend->add_option("--stride", stride, "k step")->check(CLI::PositiveNumber);

    CLI::App* fkmc = app.add_subcommand("fk-mc", "Monte Carlo check of the f_k expectation");
    add_common(fkmc);
    fkmc->add_option("--samples", opts.samples, "Monte Carlo samples per point");
    fkmc->add_option("--t", t_single, "single correlation t (default: grid 0.1..0.9)");

    CLI::App* round = app.add_subcommand("round", "full pipeline: relax, embed, round");
    add_common(round);
    round->add_option("--input", opts.input_path, "instance file (CSV or JSON)");
    round->add_option("--trials", opts.trials, "rounding trials");
    round->add_option("--rank", opts.rank, "relaxation rank (-1 = auto)");
    round->add_option("--restarts", opts.restarts, "relaxation restarts");
    round->add_option("--partition", opts.partition_path, "grid partition JSON file");

    CLI::App* brute = app.add_subcommand("bruteforce", "exact sign optimum (small instances)");
    add_common(brute);
    brute->add_option("--input", opts.input_path, "instance file (CSV or JSON)");

    CLI::App* validate = app.add_subcommand("validate", "z-scores of the scheme identity");
    add_common(validate);
    validate->add_option("--input", opts.input_path, "instance file (CSV or JSON)");
    validate->add_option("--trials", opts.trials, "rounding trials");
    validate->add_option("--rank", opts.rank, "relaxation rank (-1 = auto)");
    validate->add_option("--restarts", opts.restarts, "relaxation restarts");
    validate->add_option("--partition", opts.partition_path, "grid partition JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    for (CLI::App* sub : {coeffs, scheme, fkmc, round, brute, validate})
        if (sub->parsed() && sub->count("--k") > 0) opts.k_explicit = true;

    try {
        if (coeffs->parsed()) return cmd_coeffs(opts);
        if (scheme->parsed()) return cmd_scheme(opts);
        if (trend->parsed()) return cmd_trend(opts, k_min, k_max, stride);
        if (fkmc->parsed()) return cmd_fk_mc(opts, t_single);
        if (round->parsed()) return cmd_round(opts);
        if (brute->parsed()) return cmd_bruteforce(opts);
        if (validate->parsed()) return cmd_validate(opts);
    } catch (const krivine::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
