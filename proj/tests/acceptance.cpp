// Acceptance run: one PASS/FAIL line per criterion, measured values alongside.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "scrambling/circuit.hpp"
#include "scrambling/hitting.hpp"
#include "scrambling/moment_gap.hpp"
#include "scrambling/stabilizer.hpp"
#include "scrambling/subset_chain.hpp"
#include "scrambling/tableau.hpp"
#include "scrambling/weight_chain.hpp"

using namespace scrambling;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool lightcone_violation_seen = false;

int run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::logic_error& e) {
        if (std::string(e.what()).find("light-cone") != std::string::npos) lightcone_violation_seen = true;
        o = {false, std::string("exception: ") + e.what()};
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool pass = o.pass && in_time;
    std::printf("%s [%2d] %s: %s (%.1f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                budget_s, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
    return pass ? 0 : 1;
}

Outcome chain_correctness() {
    double worst_row = 0, worst_stat = 0;
    bool reversible = true;
    for (unsigned n : {2u, 4u, 16u, 256u, 4096u}) {
        for (unsigned x = 1; x <= n; ++x) {
            const auto r = transition_row(n, x);
            worst_row = std::max(worst_row, std::abs(r.back + r.stay + r.forward - 1.0));
        }
        const auto pi = stationary(n);
        const auto next = evolve_exact(pi, 1);
        double l1 = 0;
        for (unsigned k = 1; k <= n; ++k) l1 += std::abs(next.at(k) - pi.at(k));
        worst_stat = std::max(worst_stat, l1);
        if (n <= 32) {
            const auto q = stationary_exact(n);
            for (unsigned x = 1; x < n; ++x) {
                reversible &= q[x - 1] * transition_row_exact(n, x).forward == q[x] * transition_row_exact(n, x + 1).back;
            }
        }
    }
    return {worst_row <= 1e-12 && worst_stat <= 1e-10 && reversible,
            fmt("max row error %.2e, max |piP - pi|_1 %.2e, rational reversibility %s", worst_row, worst_stat,
                reversible ? "exact" : "BROKEN")};
}

Outcome lumping_equivalence() {
    uint64_t states = 0;
    for (uint32_t n = 2; n <= 6; ++n) {
        const auto chain = PauliChain::build(InteractionGraph::complete(n));
        for (uint64_t s = 0; s < chain.dimension(); ++s) {
            const uint32_t w = state_weight(s, n);
            Rational back = 0, stay = 0, forward = 0;
            for (const auto& [t, v] : chain.exact_row(s)) {
                const uint32_t u = state_weight(t, n);
                (u < w ? back : u == w ? stay : forward) += v;
            }
            const auto row = transition_row_exact(n, w);
            if (back != row.back || stay != row.stay || forward != row.forward) {
                return {false, fmt("mismatch at n=%u state %llu", n, static_cast<unsigned long long>(s))};
            }
            ++states;
        }
    }
    return {true, fmt("%llu states (n=2..6) lump exactly onto the weight chain", static_cast<unsigned long long>(states))};
}

Outcome tail_desk_check() {
    const double f = 0.05;
    bool ok = true;
    std::string detail;
    for (unsigned n : {64u, 128u, 256u, 512u}) {
        for (unsigned l : {1u, n / 4}) {
            const double ln = std::log(static_cast<double>(n));
            const auto t = static_cast<uint64_t>(std::ceil(10.0 * n * ln * ln));
            std::vector<uint64_t> grid;
            for (int k = 1; k <= 8; ++k) grid.push_back(t * k / 8);
            const auto curve = tail_curve(n, l, grid, f);
            const double log_second = std::log(2.0) - l * std::log(2.0) -
                                      (std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0)) - ln;
            const double bound = theorem_bound_first_term(n, f) + std::exp(log_second);
            bool monotone = true;
            for (size_t k = 1; k < curve.size(); ++k) monotone &= curve[k] <= curve[k - 1] * (1 + 1e-9);
            const bool below = curve.back() <= bound;
            ok &= monotone && below;
            detail += fmt("%sn=%u l=%u tail %.2e <= %.2e%s", detail.empty() ? "" : "; ", n, l, curve.back(), bound,
                          monotone ? "" : " NOT MONOTONE");
        }
    }
    return {ok, detail};
}

Outcome hitting_formula() {
    double worst = 0;
    for (unsigned a = 1; a <= 200; ++a) {
        worst = std::max(worst, std::abs(hitting_probability(WalkSpec::uniform(a, 0.5, 0.5)) - a / (a + 1.0)));
    }
    RandomSource rng(0xacce55);
    for (int k = 0; k < 500; ++k) {
        const double pm = 0.02 + 0.96 * rng.uniform01(), pp = 0.02 + 0.96 * rng.uniform01();
        const auto a = static_cast<unsigned>(1 + rng.uniform_below(200));
        const double closed = hitting_probability_uniform(pm / (1 - pm), pp / (1 - pp), a);
        worst = std::max(worst, std::abs(hitting_probability(WalkSpec::uniform(a, pm, pp)) - closed));
    }
    const auto spec = WalkSpec::uniform(20, 0.75, 0.75);
    const double p = hitting_probability(spec);
    RandomSource mc_rng(20);
    const auto mc = simulate_hitting(spec, 1000000, mc_rng);
    const double z = std::abs(mc.estimate() - p) / mc.sigma(p);
    return {worst <= 1e-12 && z <= 3.0,
            fmt("max closed-form deviation %.2e; Monte Carlo %.6f vs exact %.6f (%.2f sigma)", worst, mc.estimate(), p, z)};
}

Outcome parallelization() {
    const uint32_t n = 1024;
    RandomSource rng(32);
    const auto s = depth_statistics(n, n, 1000, rng);
    const double log_n = std::log2(static_cast<double>(n));
    return {s.p99 <= 8 * log_n, fmt("p99 depth %.0f = %.2f log2 n (target 8, hard limit 12); mean %.2f, max %llu", s.p99,
                                    s.p99 / log_n, s.mean, static_cast<unsigned long long>(s.max))};
}

Outcome subset_growth() {
    std::vector<ProportionEstimate> est;
    std::string detail;
    for (uint32_t n : {256u, 1024u, 4096u}) {
        RandomSource rng(0x5b5e7 + n);
        const auto depth = static_cast<uint64_t>(std::ceil(10 * std::log2(static_cast<double>(n))));
        est.push_back(survival_probability(n, 1.0 / 8, depth, 10000, rng));
        detail += fmt("%sn=%u: %.4f [%.4f, %.4f]", detail.empty() ? "" : "; ", n, est.back().estimate,
                      est.back().lower, est.back().upper);
    }
    const bool decreasing = est[1].estimate <= est[0].estimate && est[2].estimate <= est[1].estimate;
    return {decreasing && est[2].estimate < 0.05, detail + (decreasing ? "" : " (not non-increasing)")};
}

Outcome stabilizer_oracle() {
    RandomSource rng(0x0c1e);
    double worst = 0;
    int checks = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const uint32_t n = 2 + static_cast<uint32_t>(trial % 4);
        RandomSource r = rng.split(trial);
        const auto gates = sample_sequential_circuit(InteractionGraph::complete(n), r.uniform_below(8 * n), r);
        StabilizerTableau t(n);
        t.apply(gates);
        auto dense = oracle::DenseState::zero(n);
        dense.apply(gates);
        const auto mass = weight_mass_spectrum(t);
        const auto dmass = oracle::weight_spectrum(dense);
        for (uint32_t l = 0; l <= n; ++l) worst = std::max(worst, std::abs(double(mass[l]) - dmass[l]));
        for (uint32_t bits = 1; bits < (1u << n); ++bits) {
            std::vector<uint32_t> s;
            for (uint32_t q = 0; q < n; ++q)
                if ((bits >> q) & 1) s.push_back(q);
            worst = std::max(worst, std::abs(subsystem_purity(t, s) - oracle::purity(dense, s)));
            worst = std::max(worst, std::abs(trace_distance_to_mixed(t, s) - oracle::trace_distance_to_mixed(dense, s)));
            const auto rm = weight_mass_spectrum(t, std::span<const uint32_t>(s));
            const auto rd = oracle::weight_spectrum(dense, std::span<const uint32_t>(s));
            for (uint32_t l = 0; l <= n; ++l) worst = std::max(worst, std::abs(double(rm[l]) - rd[l]));
            checks += 3;
        }
    }
    return {worst <= 1e-12, fmt("200 circuits, n=2..5, %d subset comparisons, max deviation %.2e", checks, worst)};
}

Outcome strong_scrambling() {
    const uint32_t n = 20;
    const double ln = std::log(static_cast<double>(n));
    const auto t = static_cast<uint64_t>(std::ceil(3 * n * ln * ln));
    RandomSource rng(0x5c2a);
    std::vector<double> sums(4, 0.0);
    std::vector<int> counts(4, 0);
    for (int c = 0; c < 100; ++c) {
        RandomSource r = rng.split(c);
        StabilizerTableau tab(n);
        tab.apply(sample_sequential_circuit(InteractionGraph::complete(n), t, r));
        for (uint32_t size = 1; size <= 3; ++size) {
            for (int k = 0; k < 20; ++k) {
                const auto s = random_subset(n, size, r);
                sums[size] += std::ldexp(subsystem_purity(tab, s), static_cast<int>(size)) - 1.0;
                counts[size]++;
            }
        }
    }
    bool ok = true;
    std::string detail = fmt("t=%llu gates;", static_cast<unsigned long long>(t));
    for (uint32_t size = 1; size <= 3; ++size) {
        const double mean = sums[size] / counts[size];
        ok &= mean <= 0.05;
        detail += fmt(" |S|=%u: %.4f", size, mean);
    }
    return {ok, detail};
}

Outcome decoupling() {
    const uint32_t n = 20;
    const auto depth = static_cast<uint64_t>(std::ceil(10 * std::log2(static_cast<double>(n))));
    const DecouplingSetup setup{n, 2, DecouplingSetup::Mode::EntangledAncilla};
    const CircuitSampler sampler = [&](RandomSource& r) { return sample_matching_circuit(n, depth, r); };
    RandomSource rng(0xdec0);
    const auto stats = decoupling_experiment(setup, sampler, n - 8, 100, rng);
    const DecouplingSetup control{1, 1, DecouplingSetup::Mode::PureAncilla};
    const std::vector<uint32_t> mprime = {0};
    const double zero_depth = decoupling_distance(control, LayeredCircuit{1, {}}, mprime);
    return {stats.mean < 0.1 && zero_depth == 1.5 && stats.lightcone_ok,
            fmt("depth %llu, mean %.4f, p90 %.4f, max %.4f; depth-0 pure-ancilla control %.4f",
                static_cast<unsigned long long>(depth), stats.mean, stats.p90, stats.max, zero_depth)};
}

Outcome gap_scaling() {
    double lo = INFINITY, hi = 0;
    std::string detail = "gap*n:";
    for (uint32_t n = 3; n <= 7; ++n) {
        const auto r = spectral_gap(PauliChain::build(InteractionGraph::lattice(1, n)));
        lo = std::min(lo, r.gap * n);
        hi = std::max(hi, r.gap * n);
        detail += fmt(" %.4f", r.gap * n);
    }
    RandomSource rng(0x9a9);
    int holds = 0;
    for (int k = 0; k < 20; ++k) {
        const uint32_t n = 3 + static_cast<uint32_t>(k % 3);
        auto random_graph = [&] {
            std::vector<Edge> edges;
            std::vector<double> w;
            for (uint32_t i = 0; i < n; ++i)
                for (uint32_t j = i + 1; j < n; ++j)
                    if (j == i + 1 || rng.bernoulli(0.4)) {
                        edges.push_back({i, j});
                        w.push_back(0.05 + rng.uniform01());
                    }
            return PauliChain::build(InteractionGraph::explicit_edges(n, edges, w));
        };
        holds += convexity_check(random_graph(), random_graph(), rng.uniform01()).holds;
    }
    const std::vector<PauliString> five = {PauliString::from_string("XXXXX"), PauliString::from_string("XZZXI"),
                                           PauliString::from_string("IXZZX"), PauliString::from_string("XIXZZ"),
                                           PauliString::from_string("ZXIXZ")};
    const uint32_t d = code_distance(StabilizerTableau::from_stabilizers(five), 1);
    detail += fmt(" (ratio %.2f); convexity %d/20; five-qubit code distance %u", hi / lo, holds, d);
    return {hi / lo <= 3.0 && holds == 20 && d == 3, detail};
}

Outcome lightcone() {
    uint64_t trajectories = 0;
    bool ok = true;
    RandomSource rng(0x11c);
    // Subset chain: simulate_growth itself throws on an envelope violation.
    for (int k = 0; k < 2000; ++k) {
        RandomSource r = rng.split(k);
        const auto sizes = simulate_growth(256, 12, r);
        ok &= within_lightcone(sizes, 1, 256);
        ++trajectories;
    }
    // Tableau rows: every stabilizer starts as a weight-1 Z and must stay in its cone.
    auto tableau_sweep = [&](const LayeredCircuit& c, std::optional<unsigned> dim) {
        StabilizerTableau t(c.num_qubits);
        const auto env = lightcone_envelope(c.depth(), c.num_qubits, dim);
        for (size_t level = 0; level <= c.depth(); ++level) {
            if (level > 0) {
                for (const auto& g : c.levels[level - 1]) t.apply(g);
            }
            for (uint32_t q = 0; q < c.num_qubits; ++q) ok &= t.stabilizer(q).weight() <= env[level];
        }
        for (uint32_t q = 0; q < c.num_qubits; q += 7) ok &= lightcone_check(c, q, dim).holds;
        trajectories += c.num_qubits;
    };
    for (int k = 0; k < 20; ++k) {
        RandomSource r = rng.split(10000 + k);
        tableau_sweep(sample_matching_circuit(64, 8, r), std::nullopt);
        tableau_sweep(sample_coarse_lattice_circuit(CoarseGraining{1, 64, 8}, 3, 6, r), 1u);
        tableau_sweep(sample_coarse_lattice_circuit(CoarseGraining{2, 8, 4}, 3, 6, r), 2u);
        tableau_sweep(sample_coarse_lattice_circuit(CoarseGraining{3, 4, 2}, 4, 3, r), 3u);
    }
    ok &= !lightcone_violation_seen;
    return {ok, fmt("%llu trajectories checked (subset chain, tableau rows, Pauli propagation); violations in other "
                    "criteria: %s",
                    static_cast<unsigned long long>(trajectories), lightcone_violation_seen ? "yes" : "none")};
}

}  // namespace

int main() {
    int failures = 0;
    failures += run(1, "chain correctness", 10, chain_correctness);
    failures += run(2, "lumping equivalence", 60, lumping_equivalence);
    failures += run(3, "tail bound desk check", 300, tail_desk_check);
    failures += run(4, "hitting formula", 30, hitting_formula);
    failures += run(5, "parallelization depth", 30, parallelization);
    failures += run(6, "subset growth", 120, subset_growth);
    failures += run(7, "stabilizer oracle", 60, stabilizer_oracle);
    failures += run(8, "strong scrambling trend", 300, strong_scrambling);
    failures += run(9, "decoupling", 300, decoupling);
    failures += run(10, "gap scaling and convexity", 600, gap_scaling);
    failures += run(11, "light-cone bounds", 120, lightcone);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
