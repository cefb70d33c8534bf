// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each check pins its tolerance in code; statistical checks
// run at fixed seeds so the suite is deterministic.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "krivine/embedding.hpp"
#include "krivine/problems.hpp"
#include "krivine/rng.hpp"
#include "krivine/rounding.hpp"
#include "krivine/series.hpp"
#include "krivine/validator.hpp"

using namespace krivine;

namespace {

int failures = 0;

class Timer {
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
};

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    std::printf("%s  criterion %2d  (%6.2fs)  %s\n", pass ? "PASS" : "FAIL", criterion,
                seconds, detail.c_str());
    if (!pass) ++failures;
}

Matrix random_unit_rows(int rows, int cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j)
            m.at(i, j) = rng::gaussian_at(seed, static_cast<std::uint64_t>(i) * cols + j);
        const double norm = norm2(m.row(i), cols);
        for (int j = 0; j < cols; ++j) m.at(i, j) /= norm;
    }
    return m;
}

ProblemInstance random_instance(int m, int n, std::uint64_t seed) {
    ProblemInstance p;
    p.A = Matrix(m, n);
    for (int i = 0; i < m * n; ++i) p.A.data[i] = 2.0 * rng::uniform01(seed, i) - 1.0;
    return p;
}

// criterion 1: Krivine's classical constant through the generic pipeline
void criterion_1() {
    Timer timer;
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    const double expect = M_PI / (2.0 * std::log(1.0 + std::sqrt(2.0)));
    const double err = std::fabs(s.overhead - expect);
    const double seconds = timer.seconds();
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "sharp k=1 overhead %.12f vs pi/(2 ln(1+sqrt2)) %.12f, |err| %.2e <= 1e-9",
                  s.overhead, expect, err);
    report(1, err <= 1e-9 && seconds < 1.0, detail, seconds);
}

// criterion 2: coefficient identities across k = 1..128
void criterion_2() {
    Timer timer;
    bool pass = true;
    double worst_a = 0.0, worst_b = 0.0;
    for (int k = 1; k <= 128; ++k) {
        CoefficientTable t = compute_a_coefficients(k, 1e-14);
        const double a0 = t.a[0];
        const double rel_a = std::fabs(t.a[1] * 2.0 * (k + 2.0) - a0) / a0;
        worst_a = std::max(worst_a, rel_a);
        InverseTable inv = invert_odd_series(t, std::min(160, t.trunc_index()));
        const double want_b1 = -1.0 / (2.0 * (k + 2.0) * a0 * a0 * a0);
        const double rel_b = std::fabs(inv.b[1] - want_b1) / std::fabs(want_b1);
        worst_b = std::max(worst_b, rel_b);
        pass = pass && rel_a <= 1e-13 && rel_b <= 1e-11;
    }
    const double seconds = timer.seconds();
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "k=1..128: max rel err a1*2(k+2)=a0: %.2e <= 1e-13, b1 formula: %.2e <= 1e-11",
                  worst_a, worst_b);
    report(2, pass && seconds < 5.0, detail, seconds);
}

// criterion 3: normalization f_k(1) = 1 within twice the certified tail
void criterion_3() {
    Timer timer;
    bool pass = true;
    double worst_ratio = 0.0;
    for (int k = 1; k <= 128; ++k) {
        CoefficientTable t = compute_a_coefficients(k, 1e-14);
        const double gap = std::fabs(eval_fk(t, 1.0) - 1.0);
        worst_ratio = std::max(worst_ratio, gap / t.tail_bound);
        pass = pass && gap <= 2.0 * t.tail_bound;
    }
    char detail[120];
    std::snprintf(detail, sizeof detail,
                  "k=1..128: |f_k(1)-1| <= 2 tail_bound, worst ratio %.3f", worst_ratio);
    report(3, pass, detail, timer.seconds());
}

// criterion 4: tail decay and a_0 asymptotics at the frozen constants
void criterion_4() {
    Timer timer;
    bool pass = true;
    double worst = 0.0;
    for (int k = 8; k <= 128; ++k) {
        CoefficientTable t = compute_a_coefficients(k, 1e-14);
        double s2 = t.tail_bound;
        for (int n = t.trunc_index(); n >= 2; --n) s2 += t.a[n];
        const double scaled = k * static_cast<double>(k) * s2;
        worst = std::max(worst, scaled);
        pass = pass && scaled <= 1.11;
    }
    bool pass_a0 = true;
    for (int k : {10, 100, 1000}) {
        const double r = gamma_half_ratio(k);
        const double a0 = (2.0 / k) * r * r;
        pass_a0 = pass_a0 && std::fabs(a0 - (1.0 - 0.5 / k)) <= 2.0 / (static_cast<double>(k) * k);
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "k=8..128: max k^2 sum_{n>=2} a_n = %.4f <= 1.11 (frozen); a0 asymptotic ok=%d",
                  worst, pass_a0 ? 1 : 0);
    report(4, pass && pass_a0, detail, timer.seconds());
}

// criterion 5: round trip through the inverse series
void criterion_5() {
    Timer timer;
    bool pass = true;
    double worst = 0.0;
    for (int k : {1, 2, 4, 8, 16}) {
        KrivineScheme s = build_scheme(k, SchemeMode::sharp);
        for (int i = 0; i < 100; ++i) {
            const double w = -0.9 * s.c + 1.8 * s.c * i / 99.0;
            const double err = std::fabs(eval_fk(s.fwd, eval_inverse_series(s.inv, w)) - w);
            worst = std::max(worst, err);
            pass = pass && err <= 1e-8;
        }
    }
    char detail[120];
    std::snprintf(detail, sizeof detail,
                  "k in {1,2,4,8,16}, 100 points |w| <= 0.9c: max err %.2e <= 1e-8", worst);
    report(5, pass, detail, timer.seconds());
}

// criterion 6: Monte Carlo agreement with the series over 36 cells
void criterion_6() {
    Timer timer;
    int within4 = 0, within5 = 0, total = 0;
    for (int k : {1, 2, 3, 8}) {
        CoefficientTable t = compute_a_coefficients(k, 1e-14);
        for (int i = 1; i <= 9; ++i) {
            const double tt = 0.1 * i;
            McEstimate est = mc_estimate_fk(k, tt, 1000000,
                                            rng::substream(0x4B524956, 600 + 10 * k + i));
            const double z = std::fabs(est.value - eval_fk(t, tt)) / est.stderr_;
            ++total;
            if (z <= 4.0) ++within4;
            if (z <= 5.0) ++within5;
        }
    }
    const double seconds = timer.seconds();
    const bool pass = within4 >= (total * 95 + 99) / 100 && within5 == total && seconds < 60.0;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "10^6 samples x 36 cells: %d/%d within 4 stderr (need >=95%%), %d/%d within 5",
                  within4, total, within5, total);
    report(6, pass, detail, seconds);
}

// criterion 7: the constructive k=1 scheme identity across 50 configurations
void criterion_7() {
    Timer timer;
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    PartitionPair p = PartitionPair::builtin_sign_pair();
    int cells = 0, above3 = 0;
    double worst = 0.0;
    for (int cfg = 0; cfg < 50; ++cfg) {
        const int m = 1 + static_cast<int>(rng::bits(71, 2 * cfg) % 6);
        const int n = 1 + static_cast<int>(rng::bits(71, 2 * cfg + 1) % 6);
        VectorSolution sol;
        sol.X = random_unit_rows(m, m + n, rng::substream(72, cfg));
        sol.Y = random_unit_rows(n, m + n, rng::substream(73, cfg));
        Matrix z = verify_scheme_identity(sol, s, p, 100000, rng::substream(74, cfg));
        for (double v : z.data) {
            const double az = std::fabs(v);
            worst = std::max(worst, az);
            ++cells;
            if (az > 3.0) ++above3;
        }
    }
    const double seconds = timer.seconds();
    const bool pass = worst <= 4.0 && above3 * 50 <= cells && seconds < 300.0;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "50 configs x 10^5 trials: max |z| %.2f <= 4, %d/%d cells in (3,4] (<=2%%)",
                  worst, above3, cells);
    report(7, pass, detail, seconds);
}

// criterion 8: end-to-end inequality at K = 1/c
void criterion_8() {
    Timer timer;
    KrivineScheme s = build_scheme(1, SchemeMode::sharp);
    PartitionPair p = PartitionPair::builtin_sign_pair();
    bool pass = true;
    double worst_z = 0.0;
    for (int it = 0; it < 20; ++it) {
        const int m = 2 + static_cast<int>(rng::bits(81, 2 * it) % 7);
        const int n = 2 + static_cast<int>(rng::bits(81, 2 * it + 1) % 7);
        ProblemInstance inst = random_instance(m, n, rng::substream(82, it));
        SdpOptions sdp;
        sdp.seed = rng::substream(83, it);
        VectorSolution relaxed = sdp_relax(inst, sdp);
        VectorSolution pre = preprocess(relaxed, s);
        RoundingReport r =
            rounding_expectation(inst, pre, s, p, 100000, rng::substream(84, it));
        const double target = s.c * relaxed.value;
        const double z = std::fabs(r.objective_mean - target) /
                         (r.objective_stderr > 0 ? r.objective_stderr : 1.0);
        worst_z = std::max(worst_z, z);
        const double brute = brute_force_opt(inst).value;
        const double lower =
            (s.c - 4.0 * r.objective_stderr / std::fabs(relaxed.value)) * relaxed.value;
        pass = pass && z <= 4.0 && brute >= lower;
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "20 instances <=8x8: max |z| %.2f <= 4; brute >= (c - 4se/|v|) v everywhere",
                  worst_z);
    report(8, pass, detail, timer.seconds());
}

// criterion 9: smart brute force equals naive enumeration
void criterion_9() {
    Timer timer;
    bool pass = true;
    for (int it = 0; it < 100; ++it) {
        const int m = 1 + static_cast<int>(rng::bits(91, 2 * it) % 6);
        const int n = 1 + static_cast<int>(rng::bits(91, 2 * it + 1) % (12 - m));
        ProblemInstance inst = random_instance(m, n, rng::substream(92, it));
        const SignAssignment smart = brute_force_opt(inst);
        double naive = -1e300;
        std::vector<int> eps(m), delta(n);
        for (std::uint64_t mask = 0; mask < (1ull << (m + n)); ++mask) {
            for (int i = 0; i < m; ++i) eps[i] = (mask >> i) & 1 ? -1 : 1;
            for (int j = 0; j < n; ++j) delta[j] = (mask >> (m + j)) & 1 ? -1 : 1;
            naive = std::max(naive, objective(inst, eps, delta));
        }
        pass = pass && smart.value == naive;
    }
    report(9, pass, "100 instances m+n <= 12: smart == naive 2^{m+n} enumeration exactly",
           timer.seconds());
}

// criterion 10: relaxation solver quality and dominance
void criterion_10() {
    Timer timer;
    ProblemInstance chsh;
    chsh.A = Matrix(2, 2);
    chsh.A.at(0, 0) = chsh.A.at(0, 1) = chsh.A.at(1, 0) = 1.0;
    chsh.A.at(1, 1) = -1.0;
    VectorSolution sol = sdp_relax(chsh);
    const double err = std::fabs(sol.value - 2.0 * std::sqrt(2.0));
    bool pass = err <= 1e-6;

    bool dominance = true;
    for (int it = 0; it < 20; ++it) {
        const int m = 2 + static_cast<int>(rng::bits(101, 2 * it) % 7);
        const int n = 2 + static_cast<int>(rng::bits(101, 2 * it + 1) % 7);
        ProblemInstance inst = random_instance(m, n, rng::substream(102, it));
        SdpOptions sdp;
        sdp.seed = rng::substream(103, it);
        dominance = dominance &&
                    sdp_relax(inst, sdp).value >= brute_force_opt(inst).value - 1e-6;
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "CHSH-type optimum |v - 2sqrt2| = %.2e <= 1e-6; dominance on 20 instances: %d",
                  err, dominance ? 1 : 0);
    report(10, pass && dominance, detail, timer.seconds());
}

// criterion 11: scaled-gap trend of the paper-mode constant
void criterion_11() {
    Timer timer;
    std::vector<TrendRow> rows = quality_trend(16, 256, SchemeMode::paper);
    bool pass = true;
    double worst = 0.0;
    for (const TrendRow& r : rows) {
        pass = pass && r.ok;
        if (r.ok) {
            worst = std::max(worst, r.scaled_gap);
            pass = pass && r.scaled_gap <= 3.0;
        }
    }
    char detail[140];
    std::snprintf(detail, sizeof detail,
                  "paper mode k=16..256: max k(1-c_k) = %.4f <= 3.0 (frozen calibration)",
                  worst);
    report(11, pass, detail, timer.seconds());
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "FAILURES",
                failures);
    return failures == 0 ? 0 : 1;
}
