#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "scrambling/circuit.hpp"
#include "scrambling/random.hpp"
#include "scrambling/tableau.hpp"

namespace scrambling {

/// k_S: log2 of the number of stabilizer group elements supported inside S,
/// computed as n - rank of the stabilizer matrix restricted to the columns
/// outside S.
uint32_t stabilizers_inside(const StabilizerTableau& t, std::span<const uint32_t> subset);

/// Basis of the stabilizer subgroup supported inside S (size k_S).
std::vector<PauliString> stabilizer_subgroup_inside(const StabilizerTableau& t, std::span<const uint32_t> subset);

/// tr[rho_S^2] = 2^{k_S - |S|}.
double subsystem_purity(const StabilizerTableau& t, std::span<const uint32_t> subset);

/// ||rho_S - I / 2^{|S|}||_1 = 2 (1 - 2^{-k_S}).
double trace_distance_to_mixed(const StabilizerTableau& t, std::span<const uint32_t> subset);

/// mass[l] = number of stabilizer group elements of weight l, l = 0..n.
/// With `restrict`, only elements supported inside it are counted. The
/// enumerated subgroup must have dimension <= 26.
std::vector<uint64_t> weight_mass_spectrum(const StabilizerTableau& t,
                                           std::optional<std::span<const uint32_t>> restrict = std::nullopt);

inline constexpr uint32_t kMaxCodeDistanceQubits = 16;
inline constexpr uint32_t kMaxSpectrumDimension = 26;

/// Minimum weight of a Pauli commuting with the code stabilizers (rows
/// m..n-1 of the stabilizer list) but outside the group they generate.
uint32_t code_distance(const StabilizerTableau& encoded, uint32_t logical_qubits);
uint32_t code_distance(const std::vector<PauliString>& code_stabilizers);

/// Message M (m qubits) maximally entangled with M'; ancilla A' either |0>
/// or maximally entangled with a reference A. The circuit acts on B = M'A'.
/// Qubit layout: B = [0, n) with M' = [0, m) and A' = [m, n); M = [n, n + m);
/// A = [n + m, 2n) in the entangled mode.
struct DecouplingSetup {
    enum class Mode { PureAncilla, EntangledAncilla };

    uint32_t n = 2;  // |B| = |M'| + |A'|
    uint32_t m = 1;
    Mode mode = Mode::EntangledAncilla;

    void validate() const;
    uint32_t total_qubits() const { return mode == Mode::PureAncilla ? n + m : 2 * n; }
    std::vector<uint32_t> message_qubits() const;
    StabilizerTableau initial_state() const;
    /// Regime conditions on beta = m/n and f = subset_size / n from the decoupling theorem.
    bool in_theorem_regime(uint32_t subset_size) const;
};

/// ||rho_{M S} - I/2^m (x) I/2^{|S|}||_1 after applying the circuit, S subset of B.
double decoupling_distance(const DecouplingSetup& setup, const LayeredCircuit& circuit,
                           std::span<const uint32_t> subset);

struct DecouplingStats {
    std::vector<double> distances;
    double mean = 0;
    double p50 = 0;
    double p90 = 0;
    double max = 0;
    bool regime_flag = false;
    bool lightcone_ok = true;
};

using CircuitSampler = std::function<LayeredCircuit(RandomSource&)>;

/// Per trial: fresh circuit from the sampler, uniform subset of B of the
/// given size, distance on M u S. Trial k uses rng.split(k).
DecouplingStats decoupling_experiment(const DecouplingSetup& setup, const CircuitSampler& sampler,
                                      uint32_t subset_size, uint64_t trials, RandomSource& rng);

/// Uniform k-subset of [0, n), sorted.
std::vector<uint32_t> random_subset(uint32_t n, uint32_t k, RandomSource& rng);

}  // namespace scrambling
