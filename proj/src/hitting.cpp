#include "scrambling/hitting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "scrambling/weight_chain.hpp"

namespace scrambling {
namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_ratio(double p) { return std::log(p) - std::log1p(-p); }

void check_probability(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie strictly inside (0, 1), got " + std::to_string(p));
    }
}

}  // namespace

WalkSpec WalkSpec::uniform(unsigned a, double p_minus, double p_plus) {
    WalkSpec spec;
    spec.a = a;
    spec.p_minus = p_minus;
    spec.p_plus.assign(a > 0 ? a - 1 : 0, p_plus);
    return spec;
}

void WalkSpec::validate() const {
    if (a < 1) {
        throw std::invalid_argument("walk boundary a must be >= 1");
    }
    if (p_plus.size() != a - 1) {
        throw std::invalid_argument("p_plus must have a - 1 = " + std::to_string(a - 1) + " entries, got " +
                                    std::to_string(p_plus.size()));
    }
    check_probability(p_minus, "p_minus");
    for (double p : p_plus) {
        check_probability(p, "p_plus");
    }
}

double hitting_probability(const WalkSpec& spec) {
    spec.validate();
    double log_s = 0.0;  // S_a = 1
    for (unsigned i = spec.a - 1; i >= 1; --i) {
        log_s = softplus(log_s - log_ratio(spec.p_plus[i - 1]));
    }
    return 1.0 / (1.0 + std::exp(log_ratio(spec.p_minus) - log_s));
}

double hitting_probability_uniform(double alpha_minus, double alpha_plus, unsigned a) {
    if (!(alpha_minus > 0.0) || !(alpha_plus > 0.0) || !std::isfinite(alpha_minus) || !std::isfinite(alpha_plus)) {
        throw std::invalid_argument("alphas must be positive and finite");
    }
    if (a < 1) {
        throw std::invalid_argument("walk boundary a must be >= 1");
    }
    // (alpha^a - alpha^{a-1}) / (alpha^a - 1), rearranged per side of 1.
    double ratio;
    const double log_alpha = std::log(alpha_plus);
    if (alpha_plus == 1.0) {
        ratio = 1.0 / a;
    } else if (alpha_plus > 1.0) {
        ratio = (1.0 - 1.0 / alpha_plus) / -std::expm1(-static_cast<double>(a) * log_alpha);
    } else {
        ratio = (1.0 - alpha_plus) * std::exp((a - 1.0) * log_alpha) / -std::expm1(static_cast<double>(a) * log_alpha);
    }
    return 1.0 / (1.0 + alpha_minus * ratio);
}

double MonteCarloEstimate::sigma(double p) const {
    return trials ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
}

MonteCarloEstimate simulate_hitting(const WalkSpec& spec, uint64_t walks, RandomSource& rng) {
    spec.validate();
    MonteCarloEstimate out;
    out.trials = walks;
    const int a = static_cast<int>(spec.a);
    for (uint64_t w = 0; w < walks; ++w) {
        int pos = 0;
        while (pos > -1 && pos < a) {
            const double p_right = pos <= 0 ? spec.p_minus : spec.p_plus[pos - 1];
            pos += rng.uniform01() < p_right ? 1 : -1;
        }
        out.successes += pos == -1;
    }
    return out;
}

std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                                      std::vector<double> rhs) {
    const size_t m = diag.size();
    if (lower.size() != m || upper.size() != m || rhs.size() != m) {
        throw std::invalid_argument("tridiagonal bands must have equal length");
    }
    if (m == 0) {
        return {};
    }
    for (size_t i = 1; i < m; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(m);
    x[m - 1] = rhs[m - 1] / diag[m - 1];
    for (size_t i = m - 1; i-- > 0;) {
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    }
    return x;
}

DescentProbability chain_descent_probability(unsigned n, unsigned start, unsigned target) {
    const unsigned r = n / 2;
    if (n < 2 || target < 1 || target > start || start > r) {
        throw std::out_of_range("descent needs 1 <= m <= l <= n/2; got n=" + std::to_string(n) + " l=" +
                                std::to_string(start) + " m=" + std::to_string(target));
    }
    DescentProbability out;
    out.log_bound = target * std::log(2.0 * n) - start * std::log(2.0) -
                    (std::lgamma(n + 1.0) - std::lgamma(start + 1.0) - std::lgamma(n - start + 1.0));
    out.bound = std::exp(out.log_bound);
    if (n > 2048) {
        return out;
    }
    if (start == target) {
        out.exact = 1.0;
        return out;
    }
    // Unknowns h(x) for x in (target, r); h(target) = 1, h(r) = 0. Rows scaled by back + forward.
    // Absorption counts from the first step on, so a walk started at r first moves.
    const size_t m = r - target - 1;
    std::vector<double> h;
    if (m > 0) {
        std::vector<double> lower(m), diag(m, 1.0), upper(m), rhs(m, 0.0);
        for (size_t i = 0; i < m; ++i) {
            const unsigned x = target + 1 + static_cast<unsigned>(i);
            const auto row = transition_row(n, x);
            const double out_rate = row.back + row.forward;
            lower[i] = -row.back / out_rate;
            upper[i] = -row.forward / out_rate;
            if (i == 0) {
                rhs[i] = row.back / out_rate;
            }
        }
        h = solve_tridiagonal(lower, diag, upper, rhs);
    }
    auto value = [&](unsigned x) { return x == target ? 1.0 : h[x - target - 1]; };
    if (start == r) {
        const auto row = transition_row(n, r);
        out.exact = row.back / (row.back + row.forward) * value(r - 1);
    } else {
        out.exact = value(start);
    }
    return out;
}

}  // namespace scrambling
