#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scrambling/circuit.hpp"
#include "scrambling/weight_chain.hpp"

namespace scrambling {

inline constexpr uint32_t kMaxMomentChainQubits = 8;
inline constexpr uint32_t kMaxDenseMomentQubits = 5;

/// Second-moment operator of a sequential random circuit, seen as a Markov
/// chain on the 4^n - 1 non-identity Pauli strings:
/// Q = sum_e q_e Q_e, where Q_e fixes strings that are II on the edge and
/// sends any other edge value to each of the 15 non-identity values with
/// probability 1/15. State index = (base-4 string, digit q = letter on qubit
/// q with I,X,Y,Z = 0..3) - 1.
class PauliChain {
   public:
    static PauliChain build(const InteractionGraph& graph);
    /// p Q1 + (1 - p) Q2.
    static PauliChain mixture(const PauliChain& first, const PauliChain& second, double p);

    uint32_t num_qubits() const { return n_; }
    uint64_t dimension() const { return (uint64_t{1} << (2 * n_)) - 1; }
    const std::string& name() const { return name_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& weights() const { return weights_; }

    /// out = Q v (Q is symmetric, so also v Q).
    void apply(std::span<const double> v, std::span<double> out) const;

    std::vector<std::pair<uint64_t, double>> row(uint64_t state) const;
    /// Exact row; edge weights are taken as exact binary fractions unless the
    /// chain was built with uniform weights, in which case each is 1/|E|.
    std::vector<std::pair<uint64_t, Rational>> exact_row(uint64_t state) const;

    /// Dense matrix, n <= 6.
    Eigen::MatrixXd to_dense() const;

   private:
    uint32_t n_ = 0;
    std::string name_;
    std::vector<Edge> edges_;
    std::vector<double> weights_;
    std::vector<Rational> exact_weights_;
};

/// Weight (number of non-identity letters) of a chain state index.
uint32_t state_weight(uint64_t state, uint32_t n);

struct GapReport {
    uint32_t n = 0;
    std::string graph;
    double gap = 0;
    double lambda2 = 0;
    double residual = 0;
    std::string solver;
    uint64_t iterations = 0;

    /// "n,graph,gap,lambda2,solver_residual" with 17 significant digits.
    std::string csv_row() const;
    static std::string csv_header() { return "n,graph,gap,lambda2,solver_residual"; }
};

struct GapOptions {
    double tolerance = 1e-10;
    uint32_t krylov_dimension = 120;
    uint32_t max_restarts = 60;
    uint64_t seed = 0x5eed;
    bool force_iterative = false;
};

/// lambda2 = second-largest eigenvalue, gap = 1 - lambda2. Dense
/// diagonalization up to n = 5, Lanczos with full reorthogonalization on the
/// complement of the uniform vector beyond. Throws std::runtime_error with
/// the residual when the iteration does not converge.
GapReport spectral_gap(const PauliChain& chain, const GapOptions& options = {});

struct ConvexityResult {
    double gap_mix = 0;
    double lower_bound = 0;
    double gap_first = 0;
    double gap_second = 0;
    bool holds = false;
};

/// Gap of p Q1 + (1-p) Q2 against p gap1 + (1-p) gap2.
ConvexityResult convexity_check(const PauliChain& first, const PauliChain& second, double p,
                                const GapOptions& options = {});

/// d boustrophedon Hamiltonian paths of the open lattice; path k sweeps axis
/// k fastest. Every vertex appears once per path and every lattice edge lies
/// on at least one path.
std::vector<std::vector<uint32_t>> path_decomposition(unsigned d, uint32_t side);

}  // namespace scrambling
