#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scrambling/pauli.hpp"
#include "scrambling/random.hpp"

namespace scrambling {

using Edge = std::pair<uint32_t, uint32_t>;

/// Interaction graph with a probability per edge. Complete graphs are never
/// materialized unless edges() is called.
class InteractionGraph {
   public:
    enum class Kind { Complete, Lattice, Explicit };

    static InteractionGraph complete(uint32_t n);
    /// d-dimensional open-boundary square lattice with side^d sites. Site
    /// index = sum_k coord_k side^k.
    static InteractionGraph lattice(unsigned d, uint32_t side);
    /// Weights are normalized to sum to 1; empty weights means uniform.
    static InteractionGraph explicit_edges(uint32_t n, std::vector<Edge> edges, std::vector<double> weights = {});

    Kind kind() const { return kind_; }
    uint32_t num_qubits() const { return n_; }
    unsigned dimension() const { return d_; }
    uint32_t side() const { return side_; }
    std::string name() const;

    uint64_t num_edges() const;
    std::vector<Edge> edges() const;
    std::vector<double> edge_weights() const;

    /// Draws an edge according to the edge weights.
    Edge sample_edge(RandomSource& rng) const;

   private:
    Kind kind_ = Kind::Complete;
    uint32_t n_ = 0;
    unsigned d_ = 0;
    uint32_t side_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
};

std::vector<uint32_t> lattice_coordinates(uint32_t site, unsigned d, uint32_t side);
uint32_t lattice_site(const std::vector<uint32_t>& coords, uint32_t side);

struct Gate {
    uint32_t q0 = 0;
    uint32_t q1 = 1;
    uint32_t clifford_id = 0;
    bool operator==(const Gate&) const = default;
};

using GateList = std::vector<Gate>;

/// Conjugates p by the gate, discarding the sign.
void propagate(PauliString& p, const Gate& gate);

/// Gates grouped into levels of pairwise qubit-disjoint gates.
struct LayeredCircuit {
    uint32_t num_qubits = 0;
    std::vector<std::vector<Gate>> levels;

    size_t depth() const { return levels.size(); }
    size_t gate_count() const;
    GateList flatten() const;
    /// Throws if a level reuses a qubit, a gate is out of range, or a gate has i == j.
    void validate() const;
    bool operator==(const LayeredCircuit&) const = default;
};

/// t gates, pairs drawn per edge weight, clifford ids uniform. Edge
/// orientation is randomized on the complete graph.
GateList sample_sequential_circuit(const InteractionGraph& graph, uint64_t t, RandomSource& rng);

/// Each level is an independent uniform maximum matching of [n]; for odd n one
/// uniformly chosen qubit idles.
LayeredCircuit sample_matching_circuit(uint32_t n, uint64_t depth, RandomSource& rng);
std::vector<Edge> sample_matching(uint32_t n, RandomSource& rng);
/// Allocation-free form: `pool` holds any permutation of [n] (resized and
/// filled if its size differs) and is left as another permutation.
void sample_matching(uint32_t n, RandomSource& rng, std::vector<uint32_t>& pool, std::vector<Edge>& out);

/// Two offset partitions of a d-dimensional open lattice into cubic cells.
struct CoarseGraining {
    unsigned d = 1;
    uint32_t side = 2;
    uint32_t cell_side = 2;

    enum class Parity { Type1, Type2 };

    /// Throws unless cell_side >= 2 and cell_side divides side.
    void validate() const;
    uint32_t num_qubits() const;
    /// Type-2 cells are shifted by floor(cell_side / 2) along every axis and
    /// clipped at the open boundary. Each cell is a list of sites.
    std::vector<std::vector<uint32_t>> cells(Parity parity) const;
    /// Nearest-neighbor edges internal to each cell (cells without edges omitted).
    std::vector<std::vector<Edge>> cell_edges(Parity parity) const;
};

/// ceil((c ln n)^{1/d}).
uint32_t default_cell_side(uint32_t n, unsigned d, double c = 2.0);
/// ceil(c ln^2 n).
uint64_t default_gates_per_coarse_step(uint32_t n, double c = 3.0);

/// Coarse step s uses Type1 cells when s is even, Type2 when odd. Each cell
/// gets gates_per_coarse_step sequential gates on random internal edges;
/// level k of a coarse step holds the k-th gate of every cell.
LayeredCircuit sample_coarse_lattice_circuit(const CoarseGraining& cg, uint64_t coarse_steps,
                                             uint64_t gates_per_coarse_step, RandomSource& rng);

/// Greedy single-pass leveling: append to the current level until a gate
/// shares a qubit with it, then open a new level.
LayeredCircuit parallelize(const GateList& gates, uint32_t num_qubits = 0);

struct DepthSummary {
    double mean = 0;
    double p50 = 0;
    double p90 = 0;
    double p99 = 0;
    uint64_t min = 0;
    uint64_t max = 0;
    std::vector<uint64_t> depths;
};

/// Depth of parallelize(sequential complete-graph circuit of t gates), per trial.
DepthSummary depth_statistics(uint32_t n, uint64_t t, uint64_t trials, RandomSource& rng);

/// Nearest-rank quantile of a sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Per-level support envelope for an operator initially of weight 1:
/// min(n, 2^t) on general graphs, additionally (2t)^d on d-dimensional
/// lattices (1 at t = 0).
std::vector<uint64_t> lightcone_envelope(size_t depth, uint32_t n, std::optional<unsigned> lattice_dim = {});

struct LightconeReport {
    std::vector<uint64_t> envelope;       // index = number of levels applied
    std::vector<uint64_t> causal_cone;    // qubits that can be influenced by start_qubit
    std::vector<uint64_t> pauli_support;  // weight of the propagated Pauli operator
    bool holds = true;
};

/// Propagates the causal cone of start_qubit and the Pauli Z on start_qubit
/// through the circuit and compares both to the envelope.
LightconeReport lightcone_check(const LayeredCircuit& circuit, uint32_t start_qubit,
                                std::optional<unsigned> lattice_dim = {});

/// True if every entry of `sizes` (sizes[t] after t levels) stays within
/// `initial_weight` times the envelope.
bool within_lightcone(const std::vector<uint64_t>& sizes, uint64_t initial_weight, uint32_t n,
                      std::optional<unsigned> lattice_dim = {});

/// Text form: header "n=<n> model=<model> seed=<seed>", then one line per
/// gate "level i j clifford_id" in level order.
struct CircuitFile {
    LayeredCircuit circuit;
    std::string model;
    uint64_t seed = 0;
};

void write_circuit(std::ostream& out, const CircuitFile& file);
CircuitFile read_circuit(std::istream& in);

}  // namespace scrambling
