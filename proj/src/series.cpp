#include "krivine/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krivine/errors.hpp"

namespace krivine {

double CoefficientTable::coefficient_sum() const {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
}

std::string to_string(SchemeMode mode) {
    return mode == SchemeMode::sharp ? "sharp" : "paper";
}

SchemeMode scheme_mode_from_string(const std::string& s) {
    if (s == "sharp") return SchemeMode::sharp;
    if (s == "paper") return SchemeMode::paper;
    throw std::invalid_argument("unknown scheme mode: " + s);
}

double KrivineScheme::padding() const {
    return mode == SchemeMode::paper ? 4.0 * C_value / k : 0.0;
}

double gamma_half_ratio(int k) {
    if (k < 1) throw std::invalid_argument("gamma_half_ratio: k must be >= 1");
    if (k > kMaxDimension)
        throw std::invalid_argument("gamma_half_ratio: k exceeds supported range");
    // Log-gamma difference in extended precision keeps the relative error of
    // the exponentiated ratio well under the documented 1e-13 budget.
    const long double num = std::lgamma((static_cast<long double>(k) + 1.0L) / 2.0L);
    const long double den = std::lgamma(static_cast<long double>(k) / 2.0L);
    return static_cast<double>(std::exp(num - den));
}

namespace {

// Coefficient ratio a_{n+1}/a_n.
inline double coeff_ratio(int k, int n) {
    const double p = 2.0 * n + 1.0;
    return p * p / ((2.0 * n + 2.0) * (k + 2.0 * n + 2.0));
}

// Upper bound on sum_{n>N} a_n given a_{N+1}. Derived by telescoping against
// psi(n) = beta*n*a_n: the ratio recurrence gives
// n*a_n - (n+1)*a_{n+1} = a_n*(n*k/2 - 1/4)/(n + 1 + k/2), and the quotient
// (n*k/2 - 1/4)/(n + 1 + k/2) is increasing in n, so its value at n = N+1
// certifies the whole tail. Tight within a factor (k+2)/k of the true tail.
inline double tail_majorant(int k, int N, double a_next) {
    const double n1 = N + 1.0;
    const double denom = n1 * k / 2.0 - 0.25;
    return a_next * n1 * (n1 + 1.0 + k / 2.0) / denom;
}

} // namespace

CoefficientTable compute_a_coefficients(int k, double tail_tol,
                                        const CoefficientOptions& opts) {
    if (k < 1) throw std::invalid_argument("compute_a_coefficients: k must be >= 1");
    if (!(tail_tol > 0.0) || tail_tol > 1e-4)
        throw std::invalid_argument("compute_a_coefficients: tail_tol must be in (0, 1e-4]");
    const int cap = std::max(1, opts.max_terms);
    const int min_terms = std::clamp(opts.min_terms, 0, cap);

    const double ratio = gamma_half_ratio(k);
    CoefficientTable table;
    table.k = k;
    table.a.reserve(64);
    table.a.push_back((2.0 / k) * ratio * ratio);

    double a_next = table.a[0] * coeff_ratio(k, 0);
    double bound = tail_majorant(k, 0, a_next);
    while (static_cast<int>(table.a.size()) - 1 < cap &&
           (bound > tail_tol || static_cast<int>(table.a.size()) - 1 < min_terms)) {
        table.a.push_back(a_next);
        const int n = table.a.size() - 1;
        a_next *= coeff_ratio(k, n);
        bound = tail_majorant(k, n, a_next);
    }
    table.tail_bound = bound;

    if (opts.require_tail_tol && bound > tail_tol)
        throw numeric_error("compute_a_coefficients: term cap " + std::to_string(cap) +
                            " reached before meeting tail tolerance");
    return table;
}

double eval_fk(const CoefficientTable& table, double t) {
    if (!(std::fabs(t) <= 1.0))
        throw std::invalid_argument("eval_fk: |t| must be <= 1");
    const double t2 = t * t;
    double s = 0.0;
    for (int n = table.trunc_index(); n >= 0; --n) s = table.a[n] + t2 * s;
    return t * s;
}

namespace {

// Coefficient matching of g(F(t)) = t order by order. cur holds F(t)^{2m+1};
// acc[j] accumulates sum_{m<j} b_m * [t^{2j+1}] F^{2m+1}. Triangular since
// F^{2m+1} starts at order 2m+1 with pivot a0^{2m+1}.
template <typename Real>
std::vector<Real> invert_core(const std::vector<double>& f_in, int M) {
    std::vector<Real> f(f_in.begin(), f_in.begin() + M + 1);

    // E[j] = coefficient of t^{2j+2} in F(t)^2.
    std::vector<Real> E(std::max(M, 1), Real(0));
    for (int j = 0; j < M; ++j) {
        Real s = 0;
        for (int i = 0; i <= j; ++i) s += f[i] * f[j - i];
        E[j] = s;
    }

    std::vector<Real> b(M + 1, Real(0));
    std::vector<Real> cur(f);
    std::vector<Real> next(M + 1, Real(0));
    std::vector<Real> acc(M + 1, Real(0));

    b[0] = Real(1) / f[0];
    for (int j = 1; j <= M; ++j) acc[j] = b[0] * cur[j];

    for (int m = 1; m <= M; ++m) {
        std::fill(next.begin(), next.end(), Real(0));
        for (int j = m; j <= M; ++j) {
            Real s = 0;
            for (int i = m - 1; i <= j - 1; ++i) s += cur[i] * E[j - 1 - i];
            next[j] = s;
        }
        cur.swap(next);
        const Real diag = cur[m];  // a0^{2m+1}
        if (!(diag > Real(0)))
            throw numeric_error("invert_odd_series: pivot underflow at order " +
                                std::to_string(2 * m + 1));
        b[m] = -acc[m] / diag;
        if (!std::isfinite(static_cast<double>(b[m])) ||
            std::fabs(static_cast<double>(b[m])) > 1e300)
            throw numeric_error("invert_odd_series: coefficient growth overflows");
        for (int j = m + 1; j <= M; ++j) acc[j] += b[m] * cur[j];
    }
    return b;
}

} // namespace

InverseTable invert_odd_series(const CoefficientTable& table, int n_inv) {
    const double a0 = table.a.empty() ? 0.0 : table.a[0];
    if (!(a0 > 0.0)) throw numeric_error("invert_odd_series: leading coefficient not positive");
    if (n_inv < 0 || n_inv > table.trunc_index())
        throw std::invalid_argument("invert_odd_series: n_inv must be in [0, table N]");

    const int M = n_inv;

    // The back-substitution amplifies roundoff roughly like a0^{-2m}, which
    // eventually swamps the true coefficients. Running the same solve in
    // double and in extended precision locates the crossover empirically:
    // the table is cut where the two runs disagree beyond a windowed local
    // scale (windowed so that genuinely tiny coefficients, e.g. b_2 at k=2,
    // do not trigger the cut). The published values are the extended ones.
    std::vector<long double> b_wide = invert_core<long double>(table.a, M);
    std::vector<double> b(b_wide.begin(), b_wide.end());

    int keep = M + 1;
    if (static_cast<long double>(std::numeric_limits<long double>::epsilon()) <
        static_cast<long double>(std::numeric_limits<double>::epsilon())) {
        std::vector<double> b_dbl = invert_core<double>(table.a, M);
        for (int m = 1; m <= M; ++m) {
            double scale = 0.0;
            for (int j = std::max(0, m - 4); j <= m; ++j)
                scale = std::max(scale, std::fabs(b[j]));
            const double disagreement =
                std::fabs(b_dbl[m] - static_cast<double>(b_wide[m]));
            if (disagreement > 1e-7 * scale) {
                keep = m;
                break;
            }
        }
    } else {
        // No extended precision on this platform: fall back to cutting where
        // the magnitude envelope turns explosive.
        double env = std::fabs(b[0]);
        for (int m = 1; m <= M; ++m) {
            if (std::fabs(b[m]) > 10.0 * env) {
                keep = m;
                break;
            }
            env = std::max(env, std::fabs(b[m]));
        }
    }
    if (keep < 2)
        throw numeric_error("invert_odd_series: inversion lost to roundoff noise");
    b.resize(keep);

    InverseTable inv;
    inv.k = table.k;
    inv.b = std::move(b);

    // Ratio-test radius: geometric mean of |b_n/b_{n+1}|^{1/2} over the last
    // quartile of computed indices.
    const int n_coeffs = keep;
    int lo = std::max(0, (3 * n_coeffs) / 4 - 1);
    if (n_coeffs <= 4) lo = 0;
    double log_sum = 0.0;
    int count = 0;
    for (int n = lo; n < n_coeffs - 1; ++n) {
        const double num = std::fabs(inv.b[n]);
        const double den = std::fabs(inv.b[n + 1]);
        if (num > 0.0 && den > 0.0 && std::isfinite(num) && std::isfinite(den)) {
            log_sum += 0.5 * (std::log(num) - std::log(den));
            ++count;
        }
    }
    inv.radius_estimate =
        count > 0 ? std::min(std::exp(log_sum / count), 1e6) : 1e6;
    return inv;
}

double eval_inverse_series(const InverseTable& inv, double w) {
    const double w2 = w * w;
    double s = 0.0;
    for (int n = inv.trunc_index(); n >= 0; --n) s = inv.b[n] + w2 * s;
    return w * s;
}

double eval_abs_series(const InverseTable& inv, double x) {
    const double x2 = x * x;
    double s = 0.0;
    for (int n = inv.trunc_index(); n >= 0; --n) s = std::fabs(inv.b[n]) + x2 * s;
    return x * s;
}

double abs_series_tail_bound(const InverseTable& inv, double x) {
    const double R = inv.radius_estimate;
    if (!(x < R)) return std::numeric_limits<double>::infinity();
    if (x <= 0.0) return 0.0;
    const int N = inv.trunc_index();
    // log-space scale: B = max |b_n| R^{2n+1} over the last quartile, so that
    // |b_n| x^{2n+1} <= B (x/R)^{2n+1} extrapolates the remaining terms.
    int lo = std::max(0, (3 * (N + 1)) / 4 - 1);
    if (N + 1 <= 4) lo = 0;
    const double logR = std::log(R);
    double logB = -std::numeric_limits<double>::infinity();
    for (int n = lo; n <= N; ++n) {
        const double mag = std::fabs(inv.b[n]);
        if (mag > 0.0)
            logB = std::max(logB, std::log(mag) + (2.0 * n + 1.0) * logR);
    }
    if (!std::isfinite(logB)) return 0.0;
    const double logq = std::log(x) - logR;
    const double q2 = std::exp(2.0 * logq);
    const double logT = logB + (2.0 * N + 3.0) * logq - std::log1p(-q2);
    return std::exp(logT);
}

double solve_ck(const InverseTable& inv, double target) {
    if (!(target > 0.0)) throw numeric_error("solve_ck: degenerate target");
    if (inv.b.empty() || !(inv.b[0] > 0.0))
        throw numeric_error("solve_ck: invalid inverse table");

    const double hi_limit = std::min(0.999 * inv.radius_estimate, 1.0);
    if (!(eval_abs_series(inv, hi_limit) >= target))
        throw numeric_error("solve_ck: target unattainable within validated radius");

    double lo = 0.0, hi = hi_limit;
    while (hi - lo > 0.5e-12) {
        const double mid = 0.5 * (lo + hi);
        if (eval_abs_series(inv, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    const double c = 0.5 * (lo + hi);

    if (abs_series_tail_bound(inv, c) > 1e-10)
        throw numeric_error("solve_ck: truncation too coarse at c (tail bound above 1e-10)");
    return c;
}

namespace {

// Initial inverse-series size. The useful depth is limited by the roundoff
// crossover anyway; 160 comfortably covers the geometric truncation
// certificate at every dimension probed (c/radius stays below ~0.84).
int default_n_inv(int) { return 160; }

// Largest m with a0^{2m+1} above the double underflow threshold, with margin.
int underflow_safe_n_inv(double a0) {
    if (a0 >= 1.0) return std::numeric_limits<int>::max();
    const double limit = 0.95 * 708.0 / -std::log(a0);
    return std::max(4, static_cast<int>((limit - 1.0) / 2.0));
}

} // namespace

KrivineScheme build_scheme(int k, SchemeMode mode, std::optional<double> C_override,
                           const SchemeOptions& opts) {
    if (k < 1) throw std::invalid_argument("build_scheme: k must be >= 1");

    int n_inv_request = opts.n_inv > 0 ? opts.n_inv : default_n_inv(k);
    const int hard_cap = 4096;
    std::string last_error;

    for (int attempt = 0; attempt < 4; ++attempt) {
        CoefficientOptions copts;
        copts.max_terms = std::max(opts.max_terms > 0 ? opts.max_terms : kDefaultTermCap,
                                   n_inv_request);
        copts.min_terms = n_inv_request;
        CoefficientTable table = compute_a_coefficients(k, opts.tail_tol, copts);

        const double a0 = table.a[0];
        int n_inv = std::min({n_inv_request, table.trunc_index(), underflow_safe_n_inv(a0)});
        InverseTable inv = invert_odd_series(table, n_inv);

        KrivineScheme scheme;
        scheme.k = k;
        scheme.mode = mode;
        if (mode == SchemeMode::paper) {
            double C;
            if (C_override) {
                C = *C_override;
            } else {
                // Certified: |f_k(z) - a0 z| <= sum_{n>=1} a_n + tail on |z|=1.
                C = k * (table.coefficient_sum() - a0 + table.tail_bound);
            }
            scheme.C_value = C;
            if (!(a0 - 2.0 * C / k > 0.0))
                throw numeric_error("build_scheme: k too small for paper mode (a0 - 2C/k <= 0)");
            scheme.target = 1.0 - 4.0 * C / k;
            if (!(scheme.target > 0.0))
                throw numeric_error("build_scheme: k too small for paper mode (target <= 0)");
        } else {
            scheme.C_value = 0.0;
            scheme.target = 1.0;
        }

        try {
            scheme.c = solve_ck(inv, scheme.target);
        } catch (const numeric_error& e) {
            last_error = e.what();
            // A coarser-than-allowed truncation may be fixable with more terms.
            if (std::string(e.what()).find("truncation too coarse") != std::string::npos &&
                n_inv_request < hard_cap) {
                n_inv_request = std::min(hard_cap, 2 * n_inv_request);
                continue;
            }
            throw;
        }
        scheme.overhead = 1.0 / scheme.c;
        scheme.equation_residual = std::fabs(eval_abs_series(inv, scheme.c) - scheme.target);
        scheme.truncation_bound = abs_series_tail_bound(inv, scheme.c);
        scheme.fwd = std::move(table);
        scheme.inv = std::move(inv);
        return scheme;
    }
    throw numeric_error("build_scheme: " + last_error);
}

} // namespace krivine
