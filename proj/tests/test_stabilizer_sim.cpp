#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dense_oracle.hpp"
#include "scrambling/clifford_group.hpp"
#include "scrambling/stabilizer.hpp"
#include "scrambling/tableau.hpp"

using namespace scrambling;

namespace {

std::vector<std::string> stabilizer_strings(const StabilizerTableau& t) {
    std::vector<std::string> out;
    for (uint32_t i = 0; i < t.num_qubits(); ++i) {
        out.push_back((t.stabilizer_sign(i) ? "-" : "+") + t.stabilizer(i).str());
    }
    return out;
}

StabilizerTableau ghz3() {
    return StabilizerTableau::from_stabilizers(
        {PauliString::from_string("XXX"), PauliString::from_string("ZZI"), PauliString::from_string("IZZ")});
}

std::vector<uint32_t> random_nonempty_subset(uint32_t n, RandomSource& rng) {
    std::vector<uint32_t> s;
    while (s.empty()) {
        for (uint32_t q = 0; q < n; ++q)
            if (rng.bernoulli(0.5)) s.push_back(q);
    }
    return s;
}

}  // namespace

TEST(Tableau, InitialStates) {
    const StabilizerTableau zero(2);
    EXPECT_EQ(stabilizer_strings(zero), (std::vector<std::string>{"+ZI", "+IZ"}));
    EXPECT_TRUE(zero.check_invariants());
    const auto bell = StabilizerTableau::bell_pairs(2, 1);
    EXPECT_EQ(stabilizer_strings(bell), (std::vector<std::string>{"+XX", "+ZZ"}));
    EXPECT_TRUE(bell.check_invariants());
    EXPECT_THROW(StabilizerTableau::bell_pairs(3, 2), std::invalid_argument);
}

TEST(Tableau, IdentityGateAndTextbookBellFlow) {
    StabilizerTableau t(2);
    const auto before = t;
    t.apply(Gate{0, 1, 0});
    EXPECT_EQ(t, before);
    t.apply(Gate{0, 1, named_clifford_id(NamedGate::H0)});
    EXPECT_EQ(stabilizer_strings(t), (std::vector<std::string>{"+XI", "+IZ"}));
    t.apply(Gate{0, 1, named_clifford_id(NamedGate::CNOT01)});
    EXPECT_EQ(stabilizer_strings(t), (std::vector<std::string>{"+XX", "+ZZ"}));
}

TEST(Tableau, SignsTrackPauliGates) {
    StabilizerTableau t(2);
    t.apply(Gate{1, 0, named_clifford_id(NamedGate::X0)});  // X on qubit 1
    EXPECT_EQ(stabilizer_strings(t), (std::vector<std::string>{"+ZI", "-IZ"}));
}

TEST(Tableau, InvariantsAfterEveryGate) {
    RandomSource rng(71);
    StabilizerTableau t(9);
    for (int k = 0; k < 500; ++k) {
        const auto q0 = static_cast<uint32_t>(rng.uniform_below(9));
        auto q1 = static_cast<uint32_t>(rng.uniform_below(8));
        if (q1 >= q0) ++q1;
        t.apply(Gate{q0, q1, static_cast<uint32_t>(rng.uniform_below(kTwoQubitCliffordCount))});
        ASSERT_TRUE(t.check_invariants());
    }
    EXPECT_THROW(t.apply(Gate{0, 0, 1}), std::invalid_argument);
    EXPECT_THROW(t.apply(Gate{0, 1, kTwoQubitCliffordCount}), std::out_of_range);
}

TEST(Tableau, StabilizerSignsMatchDenseExpectations) {
    RandomSource rng(72);
    for (int trial = 0; trial < 100; ++trial) {
        const uint32_t n = 2 + static_cast<uint32_t>(rng.uniform_below(4));
        const auto gates = sample_sequential_circuit(InteractionGraph::complete(n), 3 * n, rng);
        StabilizerTableau t(n);
        t.apply(gates);
        auto dense = oracle::DenseState::zero(n);
        dense.apply(gates);
        for (uint32_t i = 0; i < n; ++i) {
            EXPECT_NEAR(dense.expectation(t.stabilizer(i)), t.stabilizer_sign(i) ? -1.0 : 1.0, 1e-12);
        }
    }
}

TEST(Tableau, LargeTableauCrossesWordBoundaries) {
    RandomSource rng(73);
    const uint32_t n = 100;
    StabilizerTableau t(n);
    t.apply(parallelize(sample_sequential_circuit(InteractionGraph::complete(n), 2000, rng), n));
    EXPECT_TRUE(t.check_invariants());
    EXPECT_EQ(StabilizerTableau::parse(t.dump()), t);
}

TEST(Tableau, DumpRoundTripAndRejectsCorruption) {
    RandomSource rng(74);
    StabilizerTableau t(5);
    t.apply(sample_sequential_circuit(InteractionGraph::complete(5), 40, rng));
    const std::string text = t.dump();
    EXPECT_EQ(text.substr(0, 4), "n=5\n");
    const auto back = StabilizerTableau::parse(text);
    EXPECT_EQ(back, t);
    EXPECT_EQ(back.dump(), text);
    std::string broken = text;
    const auto pos = broken.find('\n') + 1;
    broken[pos] = broken[pos] == '0' ? '1' : '0';
    EXPECT_THROW(StabilizerTableau::parse(broken), std::invalid_argument);
}

TEST(Tableau, FromStabilizersRejectsBadInput) {
    EXPECT_THROW(StabilizerTableau::from_stabilizers({PauliString::from_string("XI"), PauliString::from_string("ZI")}),
                 std::invalid_argument);
    EXPECT_THROW(StabilizerTableau::from_stabilizers({PauliString::from_string("ZI"), PauliString::from_string("ZI")}),
                 std::invalid_argument);
    const auto t = StabilizerTableau::from_stabilizers(
        {PauliString::from_string("ZZI"), PauliString::from_string("IZZ"), PauliString::from_string("XXX")},
        {false, true, false});
    EXPECT_TRUE(t.check_invariants());
    EXPECT_TRUE(t.stabilizer_sign(1));
}

TEST(Purity, Examples) {
    const StabilizerTableau zero(4);
    for (std::vector<uint32_t> s : {std::vector<uint32_t>{0}, {1, 3}, {0, 1, 2, 3}}) {
        EXPECT_EQ(subsystem_purity(zero, s), 1.0);
    }
    const std::vector<uint32_t> one = {0};
    EXPECT_EQ(subsystem_purity(StabilizerTableau::bell_pairs(2, 1), one), 0.5);
    const std::vector<uint32_t> mid = {1};
    EXPECT_EQ(subsystem_purity(ghz3(), mid), 0.5);
}

TEST(TraceDistance, Examples) {
    const std::vector<uint32_t> one = {0};
    EXPECT_EQ(trace_distance_to_mixed(StabilizerTableau::bell_pairs(2, 1), one), 0.0);
    EXPECT_EQ(trace_distance_to_mixed(StabilizerTableau(3), one), 1.0);
    const std::vector<uint32_t> two = {1, 2};
    EXPECT_EQ(stabilizers_inside(ghz3(), two), 1u);
    EXPECT_EQ(trace_distance_to_mixed(ghz3(), two), 1.0);
    auto dense = oracle::DenseState::zero(3);
    dense.apply(Gate{0, 1, named_clifford_id(NamedGate::H0)});
    dense.apply(Gate{0, 1, named_clifford_id(NamedGate::CNOT01)});
    dense.apply(Gate{1, 2, named_clifford_id(NamedGate::CNOT01)});
    EXPECT_NEAR(oracle::trace_distance_to_mixed(dense, two), 1.0, 1e-12);
    const std::vector<uint32_t> mid = {1};
    EXPECT_NEAR(oracle::purity(dense, mid), 0.5, 1e-12);
}

TEST(WeightSpectrum, Examples) {
    for (uint32_t n : {1u, 4u, 9u}) {
        const auto mass = weight_mass_spectrum(StabilizerTableau(n));
        for (uint32_t l = 0; l <= n; ++l) EXPECT_EQ(BigInt(mass[l]), binomial(n, l));
    }
    EXPECT_EQ(weight_mass_spectrum(StabilizerTableau::bell_pairs(2, 1)), (std::vector<uint64_t>{1, 0, 3}));
}

TEST(WeightSpectrum, TotalIsGroupOrderAndConservedUnderGates) {
    RandomSource rng(75);
    StabilizerTableau t(12);
    for (int k = 0; k < 20; ++k) {
        t.apply(sample_sequential_circuit(InteractionGraph::complete(12), 5, rng));
        const auto mass = weight_mass_spectrum(t);
        EXPECT_EQ(std::accumulate(mass.begin(), mass.end(), uint64_t{0}), uint64_t{1} << 12);
        EXPECT_EQ(mass[0], 1u);
    }
    EXPECT_THROW(weight_mass_spectrum(StabilizerTableau(27)), std::invalid_argument);
}

TEST(Purity, BoundsAndComplementarity) {
    RandomSource rng(76);
    for (int trial = 0; trial < 100; ++trial) {
        const uint32_t n = 2 + static_cast<uint32_t>(rng.uniform_below(11));
        StabilizerTableau t(n);
        t.apply(sample_sequential_circuit(InteractionGraph::complete(n), rng.uniform_below(4 * n), rng));
        auto s = random_nonempty_subset(n, rng);
        if (s.size() == n) s.pop_back();
        std::vector<uint32_t> comp;
        for (uint32_t q = 0; q < n; ++q)
            if (!std::binary_search(s.begin(), s.end(), q)) comp.push_back(q);
        const double p = subsystem_purity(t, s);
        EXPECT_EQ(p, subsystem_purity(t, comp));
        EXPECT_GE(p, std::ldexp(1.0, -static_cast<int>(s.size())));
        EXPECT_LE(p, 1.0);
        EXPECT_EQ(p == std::ldexp(1.0, -static_cast<int>(s.size())), trace_distance_to_mixed(t, s) == 0.0);
    }
}

TEST(Oracle, RandomCircuitsMatchDenseStates) {
    RandomSource rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const uint32_t n = 1 + static_cast<uint32_t>(rng.uniform_below(5));
        GateList gates;
        if (n >= 2) gates = sample_sequential_circuit(InteractionGraph::complete(n), rng.uniform_below(6 * n), rng);
        StabilizerTableau t(n);
        t.apply(gates);
        auto dense = oracle::DenseState::zero(n);
        dense.apply(gates);
        const auto s = random_nonempty_subset(n, rng);
        EXPECT_NEAR(subsystem_purity(t, s), oracle::purity(dense, s), 1e-12);
        EXPECT_NEAR(trace_distance_to_mixed(t, s), oracle::trace_distance_to_mixed(dense, s), 1e-12);
        const auto mass = weight_mass_spectrum(t);
        const auto dmass = oracle::weight_spectrum(dense);
        const auto rmass = weight_mass_spectrum(t, std::span<const uint32_t>(s));
        const auto rdmass = oracle::weight_spectrum(dense, std::span<const uint32_t>(s));
        for (uint32_t l = 0; l <= n; ++l) {
            EXPECT_NEAR(static_cast<double>(mass[l]), dmass[l], 1e-12);
            EXPECT_NEAR(static_cast<double>(rmass[l]), rdmass[l], 1e-12);
        }
    }
}

TEST(CodeDistance, Examples) {
    EXPECT_EQ(code_distance(StabilizerTableau(3), 1), 1u);
    StabilizerTableau rep(3);
    rep.apply(Gate{0, 1, named_clifford_id(NamedGate::CNOT01)});
    rep.apply(Gate{0, 2, named_clifford_id(NamedGate::CNOT01)});
    EXPECT_EQ(code_distance(rep, 1), 1u);
    const std::vector<PauliString> five = {PauliString::from_string("XZZXI"), PauliString::from_string("IXZZX"),
                                           PauliString::from_string("XIXZZ"), PauliString::from_string("ZXIXZ")};
    EXPECT_EQ(code_distance(five), 3u);
    const std::vector<PauliString> shor_like = {PauliString::from_string("ZZI"), PauliString::from_string("IZZ")};
    EXPECT_EQ(code_distance(shor_like), 1u);
    EXPECT_THROW(code_distance(StabilizerTableau(17), 1), std::invalid_argument);
}

TEST(CodeDistance, EncodedFiveQubitCodeViaTableau) {
    // Any tableau whose last four stabilizers generate the five-qubit code.
    std::vector<PauliString> gens = {PauliString::from_string("XXXXX"), PauliString::from_string("XZZXI"),
                                     PauliString::from_string("IXZZX"), PauliString::from_string("XIXZZ"),
                                     PauliString::from_string("ZXIXZ")};
    EXPECT_EQ(code_distance(StabilizerTableau::from_stabilizers(gens), 1), 3u);
}

TEST(Decoupling, SetupLayouts) {
    const DecouplingSetup pure{3, 1, DecouplingSetup::Mode::PureAncilla};
    const auto t = pure.initial_state();
    EXPECT_EQ(t.num_qubits(), 4u);
    EXPECT_EQ(pure.message_qubits(), std::vector<uint32_t>{3});
    auto stabs = stabilizer_strings(t);
    std::sort(stabs.begin(), stabs.end());
    EXPECT_EQ(stabs, (std::vector<std::string>{"+IIZI", "+IZII", "+XIIX", "+ZIIZ"}));
    const DecouplingSetup ent{3, 1, DecouplingSetup::Mode::EntangledAncilla};
    EXPECT_EQ(ent.total_qubits(), 6u);
    EXPECT_EQ(ent.message_qubits(), std::vector<uint32_t>{3});
    EXPECT_THROW((DecouplingSetup{3, 4, DecouplingSetup::Mode::PureAncilla}.validate()), std::invalid_argument);
}

TEST(Decoupling, DepthZeroControls) {
    const DecouplingSetup ent{4, 2, DecouplingSetup::Mode::EntangledAncilla};
    const LayeredCircuit empty{4, {}};
    EXPECT_EQ(decoupling_distance(ent, empty, {}), 0.0);
    const DecouplingSetup pure{1, 1, DecouplingSetup::Mode::PureAncilla};
    const std::vector<uint32_t> mprime = {0};
    EXPECT_DOUBLE_EQ(decoupling_distance(pure, LayeredCircuit{1, {}}, mprime), 1.5);
}

TEST(Decoupling, MatchesDenseOracle) {
    RandomSource rng(78);
    for (int trial = 0; trial < 30; ++trial) {
        const DecouplingSetup setup{2, 1, trial % 2 ? DecouplingSetup::Mode::PureAncilla
                                                    : DecouplingSetup::Mode::EntangledAncilla};
        const auto circuit = sample_matching_circuit(2, 1 + rng.uniform_below(3), rng);
        const std::vector<uint32_t> s = {static_cast<uint32_t>(rng.uniform_below(2))};
        // Dense: prepare the same initial state from |0...0> with H and CNOT.
        const uint32_t total = setup.total_qubits();
        auto dense = oracle::DenseState::zero(total);
        for (uint32_t i = 0; i < setup.m; ++i) {
            dense.apply(Gate{i, setup.n + i, named_clifford_id(NamedGate::H0)});
            dense.apply(Gate{i, setup.n + i, named_clifford_id(NamedGate::CNOT01)});
        }
        if (setup.mode == DecouplingSetup::Mode::EntangledAncilla) {
            for (uint32_t k = 0; setup.m + k < setup.n; ++k) {
                dense.apply(Gate{setup.m + k, setup.n + setup.m + k, named_clifford_id(NamedGate::H0)});
                dense.apply(Gate{setup.m + k, setup.n + setup.m + k, named_clifford_id(NamedGate::CNOT01)});
            }
        }
        dense.apply(circuit);
        std::vector<uint32_t> ms = setup.message_qubits();
        ms.insert(ms.end(), s.begin(), s.end());
        EXPECT_NEAR(decoupling_distance(setup, circuit, s), oracle::trace_distance_to_mixed(dense, ms), 1e-12);
    }
}

TEST(Decoupling, ExperimentStatistics) {
    RandomSource rng(79);
    const DecouplingSetup setup{12, 2, DecouplingSetup::Mode::EntangledAncilla};
    const CircuitSampler sampler = [](RandomSource& r) { return sample_matching_circuit(12, 30, r); };
    const auto stats = decoupling_experiment(setup, sampler, 4, 40, rng);
    EXPECT_EQ(stats.distances.size(), 40u);
    EXPECT_LE(stats.p50, stats.p90);
    EXPECT_LE(stats.p90, stats.max);
    EXPECT_TRUE(stats.lightcone_ok);
    EXPECT_THROW(decoupling_experiment(setup, sampler, 13, 1, rng), std::invalid_argument);
    RandomSource again(79);
    EXPECT_EQ(decoupling_experiment(setup, sampler, 4, 40, again).distances, stats.distances);
}

TEST(Purity, SmallSubsetRankAgreesWithSubgroupBasis) {
    RandomSource rng(78);
    for (int trial = 0; trial < 40; ++trial) {
        const uint32_t n = 8 + static_cast<uint32_t>(rng.uniform_below(120));
        StabilizerTableau t(n);
        t.apply(sample_sequential_circuit(InteractionGraph::complete(n), rng.uniform_below(3 * n), rng));
        const uint32_t k = 1 + static_cast<uint32_t>(rng.uniform_below(std::min<uint32_t>(n / 2 - 1, 32)));
        const auto s = random_subset(n, k, rng);
        EXPECT_EQ(stabilizers_inside(t, s), stabilizer_subgroup_inside(t, s).size());
    }
}
