#include "scrambling/moment_gap.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace scrambling {
namespace {

Rational rational_from_double(double v) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument("edge weight must be finite");
    }
    int exponent = 0;
    const double mantissa = std::frexp(v, &exponent);
    const auto scaled = static_cast<int64_t>(std::ldexp(mantissa, 53));
    Rational r = scaled;
    exponent -= 53;
    using boost::multiprecision::cpp_int;
    if (exponent >= 0) {
        r *= boost::multiprecision::pow(cpp_int(2), exponent);
    } else {
        r /= boost::multiprecision::pow(cpp_int(2), -exponent);
    }
    return r;
}

unsigned digit(uint64_t s, uint32_t q) { return static_cast<unsigned>((s >> (2 * q)) & 3); }

uint64_t with_digits(uint64_t s, uint32_t i, unsigned a, uint32_t j, unsigned b) {
    s &= ~((uint64_t{3} << (2 * i)) | (uint64_t{3} << (2 * j)));
    return s | (uint64_t{a} << (2 * i)) | (uint64_t{b} << (2 * j));
}

template <typename Scalar>
std::vector<std::pair<uint64_t, Scalar>> row_impl(uint64_t state, const std::vector<Edge>& edges,
                                                  const std::vector<Scalar>& weights, uint64_t dimension) {
    if (state >= dimension) {
        throw std::out_of_range("chain state out of range");
    }
    const uint64_t s = state + 1;
    std::map<uint64_t, Scalar> entries;
    for (size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        if (digit(s, i) == 0 && digit(s, j) == 0) {
            entries[state] += weights[e];
            continue;
        }
        const Scalar share = weights[e] / Scalar(15);
        for (unsigned c = 0; c < 4; ++c) {
            for (unsigned d = 0; d < 4; ++d) {
                if (c == 0 && d == 0) {
                    continue;
                }
                entries[with_digits(s, i, c, j, d) - 1] += share;
            }
        }
    }
    return {entries.begin(), entries.end()};
}

struct EigenResult {
    double value = 0;
    double residual = 0;
    uint64_t iterations = 0;
};

EigenResult dense_second_eigenvalue(const PauliChain& chain) {
    const Eigen::MatrixXd q = chain.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("dense eigensolver failed");
    }
    const auto dim = q.rows();
    EigenResult r;
    if (dim < 2) {
        r.value = 0;
        return r;
    }
    r.value = solver.eigenvalues()(dim - 2);
    const Eigen::VectorXd v = solver.eigenvectors().col(dim - 2);
    r.residual = (q * v - r.value * v).norm();
    return r;
}

// Largest eigenvalue of Q restricted to the complement of the uniform vector.
EigenResult lanczos_second_eigenvalue(const PauliChain& chain, const GapOptions& opt) {
    const auto dim = static_cast<Eigen::Index>(chain.dimension());
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    auto op = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(dim);
        chain.apply(std::span<const double>(x.data(), dim), std::span<double>(y.data(), dim));
        y -= u.dot(y) * u;
        return y;
    };

    RandomSource rng(opt.seed);
    Eigen::VectorXd start(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        start(k) = rng.uniform01() - 0.5;
    }
    start -= u.dot(start) * u;
    start.normalize();

    const auto krylov = static_cast<Eigen::Index>(std::min<uint64_t>(opt.krylov_dimension, dim - 1));
    Eigen::MatrixXd basis(dim, krylov + 1);
    EigenResult best;
    best.residual = INFINITY;
    for (uint32_t restart = 0; restart <= opt.max_restarts; ++restart) {
        std::vector<double> alpha, beta;
        basis.col(0) = start;
        Eigen::Index steps = 0;
        for (Eigen::Index k = 0; k < krylov; ++k) {
            Eigen::VectorXd w = op(basis.col(k));
            alpha.push_back(basis.col(k).dot(w));
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXd coeffs = basis.leftCols(k + 1).transpose() * w;
                w -= basis.leftCols(k + 1) * coeffs;
                w -= u.dot(w) * u;
            }
            const double b = w.norm();
            ++steps;
            ++best.iterations;
            if (b < 1e-13) {
                break;
            }
            beta.push_back(b);
            basis.col(k + 1) = w / b;
        }
        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
        for (Eigen::Index k = 0; k + 1 < m; ++k) {
            sub(k) = beta[k];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const double theta = tri.eigenvalues()(m - 1);
        Eigen::VectorXd ritz = basis.leftCols(steps) * tri.eigenvectors().col(m - 1);
        ritz.normalize();
        const double residual = (op(ritz) - theta * ritz).norm();
        if (residual < best.residual) {
            best.value = theta;
            best.residual = residual;
        }
        if (residual < opt.tolerance) {
            return best;
        }
        start = ritz;
    }
    throw std::runtime_error("Lanczos did not converge: residual " + std::to_string(best.residual) +
                             " after " + std::to_string(best.iterations) + " iterations");
}

}  // namespace

PauliChain PauliChain::build(const InteractionGraph& graph) {
    const uint32_t n = graph.num_qubits();
    if (n < 2 || n > kMaxMomentChainQubits) {
        throw std::invalid_argument("moment chain needs 2 <= n <= " + std::to_string(kMaxMomentChainQubits) +
                                    ", got n=" + std::to_string(n));
    }
    PauliChain c;
    c.n_ = n;
    c.name_ = graph.name();
    c.edges_ = graph.edges();
    c.weights_ = graph.edge_weights();
    if (c.edges_.empty()) {
        throw std::invalid_argument("interaction graph has no edges");
    }
    const bool uniform = graph.kind() != InteractionGraph::Kind::Explicit ||
                         std::all_of(c.weights_.begin(), c.weights_.end(),
                                     [&](double w) { return w == c.weights_.front(); });
    for (double w : c.weights_) {
        c.exact_weights_.push_back(uniform ? Rational(1, static_cast<int64_t>(c.edges_.size()))
                                           : rational_from_double(w));
    }
    return c;
}

PauliChain PauliChain::mixture(const PauliChain& first, const PauliChain& second, double p) {
    if (first.n_ != second.n_) {
        throw std::invalid_argument("mixture: chains act on different qubit counts");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("mixture: p must lie in [0, 1]");
    }
    const Rational pe = rational_from_double(p);
    std::map<Edge, std::pair<double, Rational>> merged;
    for (size_t e = 0; e < first.edges_.size(); ++e) {
        auto& slot = merged[first.edges_[e]];
        slot.first += p * first.weights_[e];
        slot.second += pe * first.exact_weights_[e];
    }
    for (size_t e = 0; e < second.edges_.size(); ++e) {
        auto& slot = merged[second.edges_[e]];
        slot.first += (1.0 - p) * second.weights_[e];
        slot.second += (1 - pe) * second.exact_weights_[e];
    }
    PauliChain c;
    c.n_ = first.n_;
    c.name_ = "mix(" + first.name_ + "," + second.name_ + ")";
    for (auto& [edge, w] : merged) {
        if (w.second == 0) {
            continue;
        }
        c.edges_.push_back(edge);
        c.weights_.push_back(w.first);
        c.exact_weights_.push_back(w.second);
    }
    return c;
}

void PauliChain::apply(std::span<const double> v, std::span<double> out) const {
    const uint64_t dim = dimension();
    if (v.size() != dim || out.size() != dim) {
        throw std::invalid_argument("vector size does not match chain dimension");
    }
    const uint64_t full = dim + 1;
    std::vector<double> src(full, 0.0), dst(full, 0.0);
    std::copy(v.begin(), v.end(), src.begin() + 1);
    uint64_t offsets[16];
    for (size_t e = 0; e < edges_.size(); ++e) {
        const auto [i, j] = edges_[e];
        const double q = weights_[e];
        for (unsigned c = 0; c < 4; ++c) {
            for (unsigned d = 0; d < 4; ++d) {
                offsets[4 * c + d] = (uint64_t{c} << (2 * i)) | (uint64_t{d} << (2 * j));
            }
        }
        const uint64_t mask = (uint64_t{3} << (2 * i)) | (uint64_t{3} << (2 * j));
        for (uint64_t base = 0; base < full; ++base) {
            if (base & mask) {
                continue;
            }
            dst[base] += q * src[base];
            double sum = 0.0;
            for (unsigned k = 1; k < 16; ++k) {
                sum += src[base + offsets[k]];
            }
            const double avg = q * sum / 15.0;
            for (unsigned k = 1; k < 16; ++k) {
                dst[base + offsets[k]] += avg;
            }
        }
    }
    std::copy(dst.begin() + 1, dst.end(), out.begin());
}

std::vector<std::pair<uint64_t, double>> PauliChain::row(uint64_t state) const {
    return row_impl<double>(state, edges_, weights_, dimension());
}

std::vector<std::pair<uint64_t, Rational>> PauliChain::exact_row(uint64_t state) const {
    return row_impl<Rational>(state, edges_, exact_weights_, dimension());
}

Eigen::MatrixXd PauliChain::to_dense() const {
    if (n_ > 6) {
        throw std::invalid_argument("dense moment matrix limited to n <= 6");
    }
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        for (const auto& [t, v] : row(static_cast<uint64_t>(s))) {
            q(s, static_cast<Eigen::Index>(t)) = v;
        }
    }
    return q;
}

uint32_t state_weight(uint64_t state, uint32_t n) {
    const uint64_t s = state + 1;
    uint32_t w = 0;
    for (uint32_t q = 0; q < n; ++q) {
        w += digit(s, q) != 0;
    }
    return w;
}

std::string GapReport::csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%u,%s,%.17g,%.17g,%.17g", n, graph.c_str(), gap, lambda2, residual);
    return buf;
}

GapReport spectral_gap(const PauliChain& chain, const GapOptions& options) {
    GapReport r;
    r.n = chain.num_qubits();
    r.graph = chain.name();
    EigenResult e;
    if (chain.num_qubits() <= kMaxDenseMomentQubits && !options.force_iterative) {
        e = dense_second_eigenvalue(chain);
        r.solver = "dense";
    } else {
        e = lanczos_second_eigenvalue(chain, options);
        r.solver = "lanczos";
    }
    r.lambda2 = e.value;
    r.gap = 1.0 - e.value;
    r.residual = e.residual;
    r.iterations = e.iterations;
    return r;
}

ConvexityResult convexity_check(const PauliChain& first, const PauliChain& second, double p,
                                const GapOptions& options) {
    ConvexityResult out;
    out.gap_first = spectral_gap(first, options).gap;
    out.gap_second = spectral_gap(second, options).gap;
    out.gap_mix = spectral_gap(PauliChain::mixture(first, second, p), options).gap;
    out.lower_bound = p * out.gap_first + (1.0 - p) * out.gap_second;
    out.holds = out.gap_mix >= out.lower_bound - 1e-9;
    return out;
}

std::vector<std::vector<uint32_t>> path_decomposition(unsigned d, uint32_t side) {
    if (d < 1 || d > 3) {
        throw std::invalid_argument("path_decomposition supports d in {1, 2, 3}, got " + std::to_string(d));
    }
    if (side < 2) {
        throw std::invalid_argument("path_decomposition needs side >= 2");
    }
    uint64_t total = 1;
    for (unsigned k = 0; k < d; ++k) {
        total *= side;
    }
    std::vector<std::vector<uint32_t>> paths;
    for (unsigned axis = 0; axis < d; ++axis) {
        std::vector<uint32_t> path;
        path.reserve(total);
        for (uint64_t i = 0; i < total; ++i) {
            // Reflected mixed-radix digits; digit j runs along axis (axis + j) mod d.
            std::vector<uint32_t> coords(d);
            uint64_t rest = i;
            for (unsigned j = 0; j < d; ++j) {
                const auto digit_value = static_cast<uint32_t>(rest % side);
                rest /= side;
                coords[(axis + j) % d] = (rest % 2 == 0) ? digit_value : side - 1 - digit_value;
            }
            path.push_back(lattice_site(coords, side));
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

}  // namespace scrambling
