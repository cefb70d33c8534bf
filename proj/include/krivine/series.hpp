#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace krivine {

// Truncated Taylor coefficients a_0..a_N of the odd series
// f_k(t) = sum_n a_n t^{2n+1}, with a certified upper bound on the
// discarded tail sum_{n>N} a_n.
struct CoefficientTable {
    int k = 0;
    std::vector<double> a;
    double tail_bound = 0.0;

    int trunc_index() const { return static_cast<int>(a.size()) - 1; }
    double coefficient_sum() const;
};

// Truncated coefficients b_0..b_N of the inverse series
// f_k^{-1}(w) = sum_n b_n w^{2n+1}, plus an empirical lower estimate of the
// convergence radius from the ratio test on |b_n|.
struct InverseTable {
    int k = 0;
    std::vector<double> b;
    double radius_estimate = 0.0;

    int trunc_index() const { return static_cast<int>(b.size()) - 1; }
};

enum class SchemeMode { sharp, paper };

std::string to_string(SchemeMode mode);
SchemeMode scheme_mode_from_string(const std::string& s);

// A fully assembled dimension-k rounding scheme: the constant c solving
// sum_n |b_n| c^{2n+1} = target, its reciprocal (the scheme overhead), and
// the truncated tables it was derived from.
struct KrivineScheme {
    int k = 0;
    SchemeMode mode = SchemeMode::sharp;
    double C_value = 0.0;  // constant used for the padding term; 0 in sharp mode
    double target = 1.0;
    double c = 0.0;
    double overhead = 0.0;
    CoefficientTable fwd;
    InverseTable inv;
    double equation_residual = 0.0;   // |h(c) - target| actually achieved
    double truncation_bound = 0.0;    // certified bound on the neglected h tail at c

    // Same-side padding contributed by the extra coordinate: 4C/k in paper
    // mode, 0 in sharp mode.
    double padding() const;
};

inline constexpr int kMaxDimension = 1 << 20;
inline constexpr int kDefaultTermCap = 512;
inline constexpr double kDefaultTailTol = 1e-14;

// Gamma((k+1)/2) / Gamma(k/2), the half-integer gamma ratio entering a_0.
// Relative error stays within 1e-13 for k <= 1024.
double gamma_half_ratio(int k);

struct CoefficientOptions {
    int max_terms = kDefaultTermCap;  // hard cap on the truncation index N
    int min_terms = 0;                // keep at least this many terms past the tolerance
    bool require_tail_tol = false;    // throw when the cap is hit before tail_tol is met
};

// a_0 = (2/k) * gamma_half_ratio(k)^2, then the exact product recurrence
// a_{n+1} = a_n (2n+1)^2 / ((2n+2)(k+2n+2)). N adapts until the certified
// tail bound drops below tail_tol or the cap is reached.
CoefficientTable compute_a_coefficients(int k, double tail_tol,
                                        const CoefficientOptions& opts = {});

// sum_{n<=N} a_n t^{2n+1}; |t| <= 1. Absolute error vs f_k is at most
// tail_bound. Exactly odd: eval_fk(-t) == -eval_fk(t) bit for bit.
double eval_fk(const CoefficientTable& table, double t);

// Inverse-series coefficients b_0..b_{n_inv} by coefficient matching of the
// odd-series composition, O(n_inv^3).
InverseTable invert_odd_series(const CoefficientTable& table, int n_inv);

// sum_n b_n w^{2n+1} (signed inverse series, truncated).
double eval_inverse_series(const InverseTable& inv, double w);

// h(x) = sum_n |b_n| x^{2n+1}; strictly increasing on [0, radius).
double eval_abs_series(const InverseTable& inv, double x);

// Certified-by-extrapolation bound on the neglected tail of h at x, built
// geometrically from radius_estimate. Infinite when x >= radius_estimate.
double abs_series_tail_bound(const InverseTable& inv, double x);

// The unique c in (0, 0.999*radius) with h(c) = target, by bisection to
// absolute tolerance 1e-12. Throws "degenerate target" for target <= 0 and
// "target unattainable" when h cannot reach the target inside the validated
// radius; throws when the geometric truncation bound at c exceeds 1e-10.
double solve_ck(const InverseTable& inv, double target);

struct SchemeOptions {
    double tail_tol = kDefaultTailTol;
    int n_inv = -1;          // -1: size automatically from k
    int max_terms = -1;      // -1: max(kDefaultTermCap, chosen n_inv)
};

// Assembles the full scheme. Sharp mode targets 1 (the classical condition);
// paper mode targets 1 - 4C/k with C either supplied or certified internally
// as C_k = k * sum_{n>=1} a_n(k).
KrivineScheme build_scheme(int k, SchemeMode mode,
                           std::optional<double> C_override = std::nullopt,
                           const SchemeOptions& opts = {});

} // namespace krivine
