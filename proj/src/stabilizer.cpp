#include "scrambling/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "scrambling/weight_chain.hpp"

namespace scrambling {
namespace {

using Bits = std::vector<uint64_t>;

bool get(const Bits& b, size_t k) { return (b[k >> 6] >> (k & 63)) & 1; }
void set(Bits& b, size_t k) { b[k >> 6] |= uint64_t{1} << (k & 63); }

std::vector<char> membership(uint32_t n, std::span<const uint32_t> subset) {
    std::vector<char> in(n, 0);
    for (uint32_t q : subset) {
        if (q >= n) {
            throw std::out_of_range("subset qubit " + std::to_string(q) + " outside [0, " + std::to_string(n) + ")");
        }
        in[q] = 1;
    }
    return in;
}

// Row i: (x, z) bits of stabilizer i on the qubits outside S, then, when
// `with_full` is set, the full 2n-bit symplectic vector.
struct Elimination {
    std::vector<Bits> rows;
    size_t restricted_bits = 0;
    size_t rank = 0;
};

Elimination eliminate_outside(const StabilizerTableau& t, std::span<const uint32_t> subset, bool with_full) {
    const uint32_t n = t.num_qubits();
    const auto inside = membership(n, subset);
    std::vector<uint32_t> outside;
    for (uint32_t q = 0; q < n; ++q) {
        if (!inside[q]) {
            outside.push_back(q);
        }
    }
    Elimination e;
    e.restricted_bits = 2 * outside.size();
    const size_t width = e.restricted_bits + (with_full ? 2 * size_t{n} : 0);
    e.rows.assign(n, Bits((width + 63) / 64, 0));
    for (uint32_t i = 0; i < n; ++i) {
        const PauliString s = t.stabilizer(i);
        for (size_t k = 0; k < outside.size(); ++k) {
            if (s.x(outside[k])) {
                set(e.rows[i], 2 * k);
            }
            if (s.z(outside[k])) {
                set(e.rows[i], 2 * k + 1);
            }
        }
        if (with_full) {
            for (uint32_t q = 0; q < n; ++q) {
                if (s.x(q)) {
                    set(e.rows[i], e.restricted_bits + q);
                }
                if (s.z(q)) {
                    set(e.rows[i], e.restricted_bits + n + q);
                }
            }
        }
    }
    for (size_t col = 0; col < e.restricted_bits && e.rank < n; ++col) {
        size_t sel = e.rank;
        while (sel < n && !get(e.rows[sel], col)) {
            ++sel;
        }
        if (sel == n) {
            continue;
        }
        std::swap(e.rows[sel], e.rows[e.rank]);
        const Bits& pivot = e.rows[e.rank];
        for (size_t r = e.rank + 1; r < n; ++r) {
            if (get(e.rows[r], col)) {
                for (size_t w = 0; w < pivot.size(); ++w) {
                    e.rows[r][w] ^= pivot[w];
                }
            }
        }
        ++e.rank;
    }
    return e;
}

// Pauli on <= 16 qubits packed as x bits 0..15, z bits 16..31.
using SmallPauli = uint32_t;

SmallPauli pack_small(const PauliString& p) {
    SmallPauli v = 0;
    for (size_t q = 0; q < p.num_qubits(); ++q) {
        v |= static_cast<SmallPauli>(p.x(q)) << q;
        v |= static_cast<SmallPauli>(p.z(q)) << (16 + q);
    }
    return v;
}

bool small_commute(SmallPauli a, SmallPauli b) {
    const uint32_t cross = ((a & 0xFFFF) & (b >> 16)) ^ ((a >> 16) & (b & 0xFFFF));
    return (std::popcount(cross) & 1) == 0;
}

}  // namespace

uint32_t stabilizers_inside(const StabilizerTableau& t, std::span<const uint32_t> subset) {
    const uint32_t n = t.num_qubits();
    const auto inside = membership(n, subset);
    std::vector<uint32_t> qubits;
    for (uint32_t q = 0; q < n; ++q) {
        if (inside[q]) {
            qubits.push_back(q);
        }
    }
    if (qubits.size() > 32 || 2 * qubits.size() >= n) {
        const auto e = eliminate_outside(t, subset, false);
        return n - static_cast<uint32_t>(e.rank);
    }
    // Pure state: k_S = 2|S| - rank of the stabilizers restricted to S.
    std::vector<uint64_t> rows(n, 0);
    for (size_t k = 0; k < qubits.size(); ++k) {
        for (uint32_t i = 0; i < n; ++i) {
            rows[i] |= (uint64_t{t.x_bit(n + i, qubits[k])} << (2 * k)) |
                       (uint64_t{t.z_bit(n + i, qubits[k])} << (2 * k + 1));
        }
    }
    uint32_t rank = 0;
    for (size_t col = 0; col < 2 * qubits.size() && rank < n; ++col) {
        const uint64_t bit = uint64_t{1} << col;
        uint32_t sel = rank;
        while (sel < n && !(rows[sel] & bit)) {
            ++sel;
        }
        if (sel == n) {
            continue;
        }
        std::swap(rows[sel], rows[rank]);
        for (uint32_t r = rank + 1; r < n; ++r) {
            if (rows[r] & bit) {
                rows[r] ^= rows[rank];
            }
        }
        ++rank;
    }
    return static_cast<uint32_t>(2 * qubits.size()) - rank;
}

std::vector<PauliString> stabilizer_subgroup_inside(const StabilizerTableau& t, std::span<const uint32_t> subset) {
    const uint32_t n = t.num_qubits();
    const auto e = eliminate_outside(t, subset, true);
    std::vector<PauliString> basis;
    for (size_t r = e.rank; r < n; ++r) {
        PauliString p(n);
        for (uint32_t q = 0; q < n; ++q) {
            p.set(q, letter_from_bits(get(e.rows[r], e.restricted_bits + q), get(e.rows[r], e.restricted_bits + n + q)));
        }
        basis.push_back(std::move(p));
    }
    return basis;
}

double subsystem_purity(const StabilizerTableau& t, std::span<const uint32_t> subset) {
    const auto k = static_cast<double>(stabilizers_inside(t, subset));
    return std::exp2(k - static_cast<double>(subset.size()));
}

double trace_distance_to_mixed(const StabilizerTableau& t, std::span<const uint32_t> subset) {
    const auto k = static_cast<double>(stabilizers_inside(t, subset));
    return 2.0 * (1.0 - std::exp2(-k));
}

std::vector<uint64_t> weight_mass_spectrum(const StabilizerTableau& t, std::optional<std::span<const uint32_t>> restrict) {
    const uint32_t n = t.num_qubits();
    std::vector<PauliString> basis;
    if (restrict) {
        basis = stabilizer_subgroup_inside(t, *restrict);
    } else {
        if (n > kMaxSpectrumDimension) {
            throw std::invalid_argument("weight_mass_spectrum: n=" + std::to_string(n) + " exceeds enumeration limit " +
                                        std::to_string(kMaxSpectrumDimension));
        }
        basis = t.stabilizers();
    }
    if (basis.size() > kMaxSpectrumDimension) {
        throw std::invalid_argument("weight_mass_spectrum: subgroup of dimension " + std::to_string(basis.size()) +
                                    " too large to enumerate");
    }
    const size_t words = (n + 63) / 64;
    std::vector<Bits> bx, bz;
    for (const auto& p : basis) {
        bx.emplace_back(p.x_words().begin(), p.x_words().end());
        bz.emplace_back(p.z_words().begin(), p.z_words().end());
    }
    std::vector<uint64_t> mass(n + 1, 0);
    Bits cx(words, 0), cz(words, 0);
    mass[0] = 1;
    const uint64_t count = uint64_t{1} << basis.size();
    for (uint64_t i = 1; i < count; ++i) {
        const auto k = static_cast<size_t>(std::countr_zero(i));
        size_t w = 0;
        for (size_t j = 0; j < words; ++j) {
            cx[j] ^= bx[k][j];
            cz[j] ^= bz[k][j];
            w += std::popcount(cx[j] | cz[j]);
        }
        ++mass[w];
    }
    return mass;
}

uint32_t code_distance(const StabilizerTableau& encoded, uint32_t logical_qubits) {
    const uint32_t n = encoded.num_qubits();
    if (logical_qubits < 1 || logical_qubits > n) {
        throw std::invalid_argument("code_distance: logical qubit count must lie in [1, n]");
    }
    std::vector<PauliString> code;
    for (uint32_t i = logical_qubits; i < n; ++i) {
        code.push_back(encoded.stabilizer(i));
    }
    if (code.empty()) {
        return 1;  // no stabilizers: every single-qubit Pauli is logical
    }
    return code_distance(code);
}

uint32_t code_distance(const std::vector<PauliString>& code_stabilizers) {
    if (code_stabilizers.empty()) {
        throw std::invalid_argument("code_distance: no stabilizers given");
    }
    const auto n = static_cast<uint32_t>(code_stabilizers.front().num_qubits());
    if (n > kMaxCodeDistanceQubits) {
        throw std::invalid_argument("code_distance: search space exceeded (n=" + std::to_string(n) + " > " +
                                    std::to_string(kMaxCodeDistanceQubits) + ")");
    }
    std::vector<SmallPauli> gens;
    for (const auto& p : code_stabilizers) {
        if (p.num_qubits() != n) {
            throw std::invalid_argument("code_distance: stabilizers on different qubit counts");
        }
        gens.push_back(pack_small(p));
    }
    // Echelon basis for membership tests, keyed by the highest set bit.
    std::vector<SmallPauli> echelon;
    for (SmallPauli g : gens) {
        for (SmallPauli b : echelon) {
            g = std::min(g, g ^ b);
        }
        if (g) {
            echelon.push_back(g);
            std::sort(echelon.rbegin(), echelon.rend());
        }
    }
    if (echelon.size() >= n) {
        throw std::invalid_argument("code_distance: stabilizers leave no logical qubit");
    }
    auto in_group = [&](SmallPauli v) {
        for (SmallPauli b : echelon) {
            v = std::min(v, v ^ b);
        }
        return v == 0;
    };
    constexpr SmallPauli letter_bits[3] = {0x1, 0x10001, 0x10000};  // X, Y, Z at qubit 0
    std::vector<uint32_t> qubits;
    std::vector<uint8_t> digits;
    for (uint32_t w = 1; w <= n; ++w) {
        uint32_t support = (uint32_t{1} << w) - 1;
        while (support < (uint32_t{1} << n)) {
            qubits.clear();
            for (uint32_t s = support; s; s &= s - 1) {
                qubits.push_back(static_cast<uint32_t>(std::countr_zero(s)));
            }
            digits.assign(w, 0);
            while (true) {
                SmallPauli e = 0;
                for (uint32_t k = 0; k < w; ++k) {
                    e |= letter_bits[digits[k]] << qubits[k];
                }
                bool commutes = true;
                for (SmallPauli g : gens) {
                    if (!small_commute(e, g)) {
                        commutes = false;
                        break;
                    }
                }
                if (commutes && !in_group(e)) {
                    return w;
                }
                uint32_t k = 0;
                while (k < w && ++digits[k] == 3) {
                    digits[k++] = 0;
                }
                if (k == w) {
                    break;
                }
            }
            // Next support of the same size (Gosper).
            const uint32_t c = support & -support;
            const uint32_t r = support + c;
            support = (((r ^ support) >> 2) / c) | r;
        }
    }
    throw std::logic_error("code_distance: no logical operator found");
}

void DecouplingSetup::validate() const {
    if (m < 1 || m > n) {
        throw std::invalid_argument("decoupling setup needs 1 <= m <= n; got m=" + std::to_string(m) +
                                    " n=" + std::to_string(n));
    }
}

std::vector<uint32_t> DecouplingSetup::message_qubits() const {
    std::vector<uint32_t> out(m);
    std::iota(out.begin(), out.end(), n);
    return out;
}

StabilizerTableau DecouplingSetup::initial_state() const {
    validate();
    std::vector<Edge> pairs;
    for (uint32_t i = 0; i < m; ++i) {
        pairs.emplace_back(i, n + i);
    }
    if (mode == Mode::EntangledAncilla) {
        for (uint32_t k = 0; k < n - m; ++k) {
            pairs.emplace_back(m + k, n + m + k);
        }
    }
    return StabilizerTableau::bell_pairs(total_qubits(), pairs);
}

bool DecouplingSetup::in_theorem_regime(uint32_t subset_size) const {
    const double beta = static_cast<double>(m) / n;
    const double f = static_cast<double>(subset_size) / n;
    const double log3 = std::log2(3.0);
    const double slack = log3 / 2.0 - f * log3 - binary_entropy(f);
    if (mode == Mode::PureAncilla) {
        return beta < 1.0 / 9.0 && beta < slack;
    }
    return beta < 2.0 / 3.0 && beta < (1.0 + slack) / 2.0;
}

double decoupling_distance(const DecouplingSetup& setup, const LayeredCircuit& circuit,
                           std::span<const uint32_t> subset) {
    setup.validate();
    if (circuit.num_qubits != setup.n) {
        throw std::invalid_argument("circuit must act on exactly the n qubits of M'A'");
    }
    for (uint32_t q : subset) {
        if (q >= setup.n) {
            throw std::out_of_range("subset must lie inside the output system B");
        }
    }
    auto state = setup.initial_state();
    state.apply(circuit);
    auto measured = setup.message_qubits();
    measured.insert(measured.end(), subset.begin(), subset.end());
    return trace_distance_to_mixed(state, measured);
}

std::vector<uint32_t> random_subset(uint32_t n, uint32_t k, RandomSource& rng) {
    if (k > n) {
        throw std::invalid_argument("subset size exceeds population");
    }
    std::vector<uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (uint32_t r = 0; r < k; ++r) {
        std::swap(perm[r], perm[r + rng.uniform_below(n - r)]);
    }
    perm.resize(k);
    std::sort(perm.begin(), perm.end());
    return perm;
}

DecouplingStats decoupling_experiment(const DecouplingSetup& setup, const CircuitSampler& sampler,
                                      uint32_t subset_size, uint64_t trials, RandomSource& rng) {
    setup.validate();
    if (subset_size > setup.n) {
        throw std::invalid_argument("subset_size " + std::to_string(subset_size) + " exceeds |B|=" +
                                    std::to_string(setup.n));
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    DecouplingStats stats;
    stats.regime_flag = setup.in_theorem_regime(subset_size);
    for (uint64_t k = 0; k < trials; ++k) {
        RandomSource trial_rng = rng.split(k);
        const LayeredCircuit circuit = sampler(trial_rng);
        if (circuit.depth() > 0) {
            stats.lightcone_ok = stats.lightcone_ok && lightcone_check(circuit, 0).holds;
        }
        const auto subset = random_subset(setup.n, subset_size, trial_rng);
        stats.distances.push_back(decoupling_distance(setup, circuit, subset));
    }
    stats.mean = std::accumulate(stats.distances.begin(), stats.distances.end(), 0.0) / trials;
    stats.p50 = quantile(stats.distances, 0.5);
    stats.p90 = quantile(stats.distances, 0.9);
    stats.max = *std::max_element(stats.distances.begin(), stats.distances.end());
    if (!stats.lightcone_ok) {
        throw std::logic_error("decoupling circuit violated the light-cone envelope");
    }
    return stats;
}

}  // namespace scrambling
