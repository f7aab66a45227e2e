#include "scrambling/weight_chain.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace scrambling {
namespace {

void check_state(unsigned n, unsigned x) {
    if (n < 2) {
        throw std::invalid_argument("weight chain needs n >= 2, got n=" + std::to_string(n));
    }
    if (x < 1 || x > n) {
        throw std::out_of_range("weight " + std::to_string(x) + " outside [1, " + std::to_string(n) + "]");
    }
}

double log_binomial(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

}  // namespace

TransitionRow transition_row(unsigned n, unsigned x) {
    check_state(n, x);
    const double nn = n;
    const double xx = x;
    const double denom = 5.0 * nn * (nn - 1.0);
    TransitionRow r;
    r.back = 2.0 * xx * (xx - 1.0) / denom;
    r.forward = 6.0 * xx * (nn - xx) / denom;
    r.stay = 1.0 - 2.0 * xx * (3.0 * nn - 2.0 * xx - 1.0) / denom;
    return r;
}

ExactTransitionRow transition_row_exact(unsigned n, unsigned x) {
    check_state(n, x);
    const Rational nn = n;
    const Rational xx = x;
    const Rational denom = 5 * nn * (nn - 1);
    ExactTransitionRow r;
    r.back = 2 * xx * (xx - 1) / denom;
    r.forward = 6 * xx * (nn - xx) / denom;
    r.stay = 1 - 2 * xx * (3 * nn - 2 * xx - 1) / denom;
    return r;
}

WeightChain::WeightChain(unsigned n) : WeightChain(n, transition_row) {}

WeightChain::WeightChain(unsigned n, const std::function<TransitionRow(unsigned, unsigned)>& row_fn) : n_(n) {
    check_state(n, 1);
    rows_.reserve(n);
    for (unsigned x = 1; x <= n; ++x) {
        rows_.push_back(row_fn(n, x));
    }
}

void WeightChain::step(std::span<double> mass, std::span<double> scratch) const {
    const size_t n = n_;
    for (size_t y = 0; y < n; ++y) {
        double v = mass[y] * rows_[y].stay;
        if (y > 0) {
            v += mass[y - 1] * rows_[y - 1].forward;
        }
        if (y + 1 < n) {
            v += mass[y + 1] * rows_[y + 1].back;
        }
        scratch[y] = v;
    }
    std::copy(scratch.begin(), scratch.end(), mass.begin());
}

WeightDistribution WeightDistribution::point_mass(unsigned n, unsigned weight) {
    check_state(n, weight);
    WeightDistribution d{n, std::vector<double>(n, 0.0)};
    d.mass[weight - 1] = 1.0;
    return d;
}

double WeightDistribution::total() const { return compensated_sum(mass); }

WeightDistribution stationary(unsigned n) {
    check_state(n, 1);
    // log of 3^k C(n,k) via the ratio 3(n-k)/(k+1), then normalized.
    std::vector<double> logs(n);
    logs[0] = std::log(3.0) + std::log(static_cast<double>(n));
    for (unsigned k = 1; k < n; ++k) {
        logs[k] = logs[k - 1] + std::log(3.0 * (n - k) / (k + 1.0));
    }
    const double top = *std::max_element(logs.begin(), logs.end());
    WeightDistribution d{n, std::vector<double>(n)};
    for (unsigned k = 0; k < n; ++k) {
        d.mass[k] = std::exp(logs[k] - top);
    }
    const double z = compensated_sum(d.mass);
    for (auto& v : d.mass) {
        v /= z;
    }
    return d;
}

std::vector<Rational> stationary_exact(unsigned n) {
    check_state(n, 1);
    using boost::multiprecision::cpp_int;
    const cpp_int norm = boost::multiprecision::pow(cpp_int(4), n) - 1;
    std::vector<Rational> pi(n);
    cpp_int numer = 3 * cpp_int(n);  // 3^1 C(n,1)
    for (unsigned k = 1; k <= n; ++k) {
        pi[k - 1] = Rational(numer, norm);
        numer = numer * 3 * (n - k) / (k + 1);
    }
    return pi;
}

WeightDistribution evolve_exact(const WeightDistribution& dist, uint64_t t) {
    return evolve_exact(WeightChain(dist.n), dist, t);
}

WeightDistribution evolve_exact(const WeightChain& chain, const WeightDistribution& dist, uint64_t t) {
    if (dist.n != chain.n() || dist.mass.size() != dist.n) {
        throw std::invalid_argument("distribution size does not match chain");
    }
    WeightDistribution out = dist;
    std::vector<double> scratch(dist.n);
    for (uint64_t s = 0; s < t; ++s) {
        chain.step(out.mass, scratch);
    }
    return out;
}

std::vector<Rational> evolve_rational(unsigned n, std::vector<Rational> mass, uint64_t t) {
    if (mass.size() != n) {
        throw std::invalid_argument("distribution size does not match chain");
    }
    std::vector<ExactTransitionRow> rows;
    for (unsigned x = 1; x <= n; ++x) {
        rows.push_back(transition_row_exact(n, x));
    }
    std::vector<Rational> next(n);
    for (uint64_t s = 0; s < t; ++s) {
        for (size_t y = 0; y < n; ++y) {
            Rational v = mass[y] * rows[y].stay;
            if (y > 0) {
                v += mass[y - 1] * rows[y - 1].forward;
            }
            if (y + 1 < n) {
                v += mass[y + 1] * rows[y + 1].back;
            }
            next[y] = v;
        }
        mass.swap(next);
    }
    return mass;
}

unsigned weight_threshold(unsigned n, double f) {
    return static_cast<unsigned>(std::floor(f * n + 1e-9));
}

double tail_probability(unsigned n, unsigned start_weight, uint64_t t, double f) {
    const uint64_t times[] = {t};
    return tail_curve(n, start_weight, times, f).front();
}

std::vector<double> tail_curve(unsigned n, unsigned start_weight, std::span<const uint64_t> times, double f) {
    if (!(f > 0.0 && f < 1.0)) {
        throw std::invalid_argument("tail fraction f must lie in (0, 1)");
    }
    const WeightChain chain(n);
    auto dist = WeightDistribution::point_mass(n, start_weight);
    const unsigned threshold = std::min(weight_threshold(n, f), n);

    std::vector<size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return times[a] < times[b]; });

    std::vector<double> out(times.size());
    std::vector<double> scratch(n);
    uint64_t now = 0;
    for (size_t idx : order) {
        for (; now < times[idx]; ++now) {
            chain.step(dist.mass, scratch);
        }
        out[idx] = compensated_sum(std::span<const double>(dist.mass.data(), threshold));
    }
    return out;
}

double binary_entropy(double f) {
    if (f <= 0.0 || f >= 1.0) {
        return 0.0;
    }
    return -f * std::log2(f) - (1.0 - f) * std::log2(1.0 - f);
}

double log2_theorem_bound_first_term(unsigned n, double f) {
    if (!(f >= 0.0 && f < 0.5)) {
        throw std::invalid_argument("bound fraction f must lie in (0, 1/2)");
    }
    check_state(n, 1);
    const unsigned r = n / 2;
    const double exponent = (f * std::log2(3.0) + binary_entropy(f)) * n;
    return exponent - log_binomial(n, r) / std::log(2.0) - r * std::log2(3.0);
}

double theorem_bound_first_term(unsigned n, double f) { return std::exp2(log2_theorem_bound_first_term(n, f)); }

bool TheoremBound::valid_regime() const {
    return f * std::log2(3.0) + binary_entropy(f) - std::log2(3.0) / 2.0 < 0.0;
}

double TheoremBound::second_term() const {
    check_state(n, start_weight);
    const double log2_denominator = start_weight + log_binomial(n, start_weight) / std::log(2.0) +
                                    poly_exponent * std::log2(static_cast<double>(n));
    return std::exp2(-log2_denominator);
}

std::vector<unsigned> simulate_trajectory(unsigned n, unsigned start_weight, uint64_t t, RandomSource& rng) {
    return simulate_trajectory(WeightChain(n), start_weight, t, rng);
}

std::vector<unsigned> simulate_trajectory(const WeightChain& chain, unsigned start_weight, uint64_t t,
                                          RandomSource& rng) {
    check_state(chain.n(), start_weight);
    std::vector<unsigned> path;
    path.reserve(t + 1);
    unsigned x = start_weight;
    path.push_back(x);
    for (uint64_t s = 0; s < t; ++s) {
        const auto& row = chain.row(x);
        const double u = rng.uniform01();
        if (u < row.back) {
            --x;
        } else if (u >= row.back + row.stay && x < chain.n()) {
            ++x;
        }
        path.push_back(x);
    }
    return path;
}

ChainGap chain_spectral_gap(unsigned n) {
    check_state(n, 1);
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n - 1);
    for (unsigned x = 1; x <= n; ++x) {
        const auto r = transition_row(n, x);
        diag(x - 1) = r.stay;
        if (x < n) {
            sub(x - 1) = std::sqrt(r.forward * transition_row(n, x + 1).back);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("tridiagonal eigensolver did not converge for n=" + std::to_string(n));
    }
    ChainGap out;
    const auto& ev = solver.eigenvalues();
    out.eigenvalues.assign(ev.data(), ev.data() + n);
    out.slem = std::max(std::abs(ev(0)), std::abs(ev(n - 2)));
    out.gap = 1.0 - out.slem;
    return out;
}

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

}  // namespace scrambling
