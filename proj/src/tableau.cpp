#include "scrambling/tableau.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scrambling/clifford_group.hpp"

namespace scrambling {
namespace {

using Bits = std::vector<uint64_t>;

bool get(const Bits& b, size_t k) { return (b[k >> 6] >> (k & 63)) & 1; }
void flip(Bits& b, size_t k) { b[k >> 6] ^= uint64_t{1} << (k & 63); }
void xor_into(Bits& dst, const Bits& src) {
    for (size_t w = 0; w < dst.size(); ++w) {
        dst[w] ^= src[w];
    }
}

// Symplectic vector (x | z) of length 2n.
Bits to_bits(const PauliString& p) {
    const size_t n = p.num_qubits();
    Bits b((2 * n + 63) / 64, 0);
    for (size_t q = 0; q < n; ++q) {
        if (p.x(q)) {
            flip(b, q);
        }
        if (p.z(q)) {
            flip(b, n + q);
        }
    }
    return b;
}

PauliString from_bits(const Bits& b, size_t n) {
    PauliString p(n);
    for (size_t q = 0; q < n; ++q) {
        p.set(q, letter_from_bits(get(b, q), get(b, n + q)));
    }
    return p;
}

unsigned symplectic(const Bits& u, const Bits& v, size_t n) {
    unsigned s = 0;
    for (size_t q = 0; q < n; ++q) {
        s ^= (get(u, q) & get(v, n + q)) ^ (get(u, n + q) & get(v, q));
    }
    return s;
}

}  // namespace

StabilizerTableau::StabilizerTableau(uint32_t n)
    : n_(n), words_((2 * n + 63) / 64), xs_(size_t{n} * words_, 0), zs_(size_t{n} * words_, 0), signs_(words_, 0) {
    for (uint32_t q = 0; q < n; ++q) {
        set_bit(xs_, q, q, true);
        set_bit(zs_, n + q, q, true);
    }
}

void StabilizerTableau::set_bit(std::vector<uint64_t>& cols, uint32_t r, uint32_t q, bool v) {
    auto& w = cols[q * words_ + (r >> 6)];
    const uint64_t mask = uint64_t{1} << (r & 63);
    w = v ? (w | mask) : (w & ~mask);
}

void StabilizerTableau::set_row(uint32_t r, const PauliString& p, bool negative) {
    for (uint32_t q = 0; q < n_; ++q) {
        set_bit(xs_, r, q, p.x(q));
        set_bit(zs_, r, q, p.z(q));
    }
    const uint64_t mask = uint64_t{1} << (r & 63);
    signs_[r >> 6] = negative ? (signs_[r >> 6] | mask) : (signs_[r >> 6] & ~mask);
}

StabilizerTableau StabilizerTableau::bell_pairs(uint32_t n, std::span<const Edge> pairs) {
    StabilizerTableau t(n);
    std::vector<char> used(n, 0);
    for (size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        if (i >= n || j >= n || i == j || used[i] || used[j]) {
            throw std::invalid_argument("Bell pairs must be disjoint pairs of distinct qubits");
        }
        used[i] = used[j] = 1;
        // Stabilizers X_i X_j (slot i) and Z_i Z_j (slot j); destabilizers Z_i and X_j.
        PauliString xx(n), zz(n), zi(n), xj(n);
        xx.set(i, Letter::X);
        xx.set(j, Letter::X);
        zz.set(i, Letter::Z);
        zz.set(j, Letter::Z);
        zi.set(i, Letter::Z);
        xj.set(j, Letter::X);
        t.set_row(n + i, xx, false);
        t.set_row(n + j, zz, false);
        t.set_row(i, zi, false);
        t.set_row(j, xj, false);
    }
    return t;
}

StabilizerTableau StabilizerTableau::bell_pairs(uint32_t n, uint32_t m) {
    if (2 * m > n) {
        throw std::invalid_argument("bell_pairs: m=" + std::to_string(m) + " exceeds n/2 for n=" + std::to_string(n));
    }
    std::vector<Edge> pairs;
    for (uint32_t k = 0; k < m; ++k) {
        pairs.emplace_back(2 * k, 2 * k + 1);
    }
    return bell_pairs(n, pairs);
}

StabilizerTableau StabilizerTableau::from_stabilizers(const std::vector<PauliString>& generators,
                                                      const std::vector<bool>& negative) {
    const size_t n = generators.size();
    if (n == 0) {
        throw std::invalid_argument("from_stabilizers: no generators");
    }
    for (const auto& g : generators) {
        if (g.num_qubits() != n) {
            throw std::invalid_argument("from_stabilizers: need exactly n generators on n qubits");
        }
    }
    if (!negative.empty() && negative.size() != n) {
        throw std::invalid_argument("from_stabilizers: one sign per generator");
    }
    std::vector<Bits> stab;
    for (const auto& g : generators) {
        stab.push_back(to_bits(g));
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (symplectic(stab[i], stab[j], n)) {
                throw std::invalid_argument("from_stabilizers: generators " + std::to_string(i) + " and " +
                                            std::to_string(j) + " anticommute");
            }
        }
    }
    // Row j of the system is the swapped vector (z | x), so row_j . d = <d, s_j>.
    const size_t width = 2 * n;
    std::vector<Bits> rows(n, Bits((width + 63) / 64, 0));
    std::vector<Bits> ops(n, Bits((n + 63) / 64, 0));
    for (size_t j = 0; j < n; ++j) {
        for (size_t q = 0; q < n; ++q) {
            if (get(stab[j], n + q)) {
                flip(rows[j], q);
            }
            if (get(stab[j], q)) {
                flip(rows[j], n + q);
            }
        }
        flip(ops[j], j);
    }
    std::vector<size_t> pivots;
    size_t rank = 0;
    for (size_t col = 0; col < width && rank < n; ++col) {
        size_t sel = rank;
        while (sel < n && !get(rows[sel], col)) {
            ++sel;
        }
        if (sel == n) {
            continue;
        }
        std::swap(rows[sel], rows[rank]);
        std::swap(ops[sel], ops[rank]);
        for (size_t r = 0; r < n; ++r) {
            if (r != rank && get(rows[r], col)) {
                xor_into(rows[r], rows[rank]);
                xor_into(ops[r], ops[rank]);
            }
        }
        pivots.push_back(col);
        ++rank;
    }
    if (rank < n) {
        throw std::invalid_argument("from_stabilizers: generators are not independent");
    }
    std::vector<Bits> destab(n, Bits((width + 63) / 64, 0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < n; ++k) {
            if (get(ops[k], i)) {
                flip(destab[i], pivots[k]);
            }
        }
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < i; ++j) {
            if (symplectic(destab[i], destab[j], n)) {
                xor_into(destab[i], stab[j]);
            }
        }
    }
    StabilizerTableau t(static_cast<uint32_t>(n));
    for (size_t i = 0; i < n; ++i) {
        t.set_row(static_cast<uint32_t>(i), from_bits(destab[i], n), false);
        t.set_row(static_cast<uint32_t>(n + i), generators[i], !negative.empty() && negative[i]);
    }
    if (!t.check_invariants()) {
        throw std::logic_error("from_stabilizers: destabilizer completion failed");
    }
    return t;
}

void StabilizerTableau::apply(const Gate& gate) {
    if (gate.q0 >= n_ || gate.q1 >= n_ || gate.q0 == gate.q1) {
        throw std::invalid_argument("gate qubits (" + std::to_string(gate.q0) + "," + std::to_string(gate.q1) +
                                    ") invalid for n=" + std::to_string(n_));
    }
    const auto& act = TwoQubitCliffordTable::instance()[gate.clifford_id];
    uint64_t* cols[4] = {&xs_[gate.q0 * words_], &zs_[gate.q0 * words_], &xs_[gate.q1 * words_],
                         &zs_[gate.q1 * words_]};
    for (uint32_t w = 0; w < words_; ++w) {
        const uint64_t in[4] = {cols[0][w], cols[1][w], cols[2][w], cols[3][w]};
        uint64_t monomial[16];
        monomial[0] = ~uint64_t{0};
        uint64_t sign = (act.sign_anf & 1) ? monomial[0] : 0;
        for (unsigned m = 1; m < 16; ++m) {
            const unsigned top = 31 - static_cast<unsigned>(__builtin_clz(m));
            monomial[m] = monomial[m ^ (1u << top)] & in[top];
            if ((act.sign_anf >> m) & 1) {
                sign ^= monomial[m];
            }
        }
        for (unsigned out = 0; out < 4; ++out) {
            uint64_t v = 0;
            for (unsigned k = 0; k < 4; ++k) {
                if ((act.column_mask[out] >> k) & 1) {
                    v ^= in[k];
                }
            }
            cols[out][w] = v;
        }
        signs_[w] ^= sign;
    }
    const uint32_t tail = (2 * n_) & 63;
    if (tail) {
        signs_[words_ - 1] &= (uint64_t{1} << tail) - 1;
    }
}

void StabilizerTableau::apply(const GateList& gates) {
    for (const auto& g : gates) {
        apply(g);
    }
}

void StabilizerTableau::apply(const LayeredCircuit& circuit) {
    if (circuit.num_qubits > n_) {
        throw std::invalid_argument("circuit acts on more qubits than the tableau holds");
    }
    for (const auto& level : circuit.levels) {
        for (const auto& g : level) {
            apply(g);
        }
    }
}

PauliString StabilizerTableau::row(uint32_t r) const {
    if (r >= 2 * n_) {
        throw std::out_of_range("tableau row out of range");
    }
    PauliString p(n_);
    for (uint32_t q = 0; q < n_; ++q) {
        p.set(q, letter_from_bits(bit(xs_, r, q), bit(zs_, r, q)));
    }
    return p;
}

std::vector<PauliString> StabilizerTableau::stabilizers() const {
    std::vector<PauliString> out;
    out.reserve(n_);
    for (uint32_t i = 0; i < n_; ++i) {
        out.push_back(stabilizer(i));
    }
    return out;
}

bool StabilizerTableau::check_invariants() const {
    std::vector<PauliString> rows;
    rows.reserve(2 * n_);
    for (uint32_t r = 0; r < 2 * n_; ++r) {
        rows.push_back(row(r));
    }
    for (uint32_t r = 0; r < 2 * n_; ++r) {
        for (uint32_t s = r + 1; s < 2 * n_; ++s) {
            const bool anticommute = !rows[r].commutes(rows[s]);
            const bool expected = r < n_ && s == r + n_;
            if (anticommute != expected) {
                return false;
            }
        }
    }
    return true;
}

void StabilizerTableau::dump(std::ostream& out) const {
    out << "n=" << n_ << "\n";
    for (uint32_t r = 0; r < 2 * n_; ++r) {
        std::string xb(n_, '0');
        std::string zb(n_, '0');
        for (uint32_t q = 0; q < n_; ++q) {
            xb[q] = bit(xs_, r, q) ? '1' : '0';
            zb[q] = bit(zs_, r, q) ? '1' : '0';
        }
        out << xb << " " << zb << " " << (row_sign(r) ? '1' : '0') << "\n";
    }
}

std::string StabilizerTableau::dump() const {
    std::ostringstream ss;
    dump(ss);
    return ss.str();
}

StabilizerTableau StabilizerTableau::parse(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("n=", 0) != 0) {
        throw std::invalid_argument("tableau dump: expected header n=<n>");
    }
    const auto n = static_cast<uint32_t>(std::stoul(header.substr(2)));
    StabilizerTableau t(n);
    for (uint32_t r = 0; r < 2 * n; ++r) {
        std::string xb, zb, sign;
        if (!(in >> xb >> zb >> sign) || xb.size() != n || zb.size() != n || (sign != "0" && sign != "1")) {
            throw std::invalid_argument("tableau dump: malformed row " + std::to_string(r));
        }
        PauliString p(n);
        for (uint32_t q = 0; q < n; ++q) {
            if ((xb[q] != '0' && xb[q] != '1') || (zb[q] != '0' && zb[q] != '1')) {
                throw std::invalid_argument("tableau dump: non-binary digit in row " + std::to_string(r));
            }
            p.set(q, letter_from_bits(xb[q] == '1', zb[q] == '1'));
        }
        t.set_row(r, p, sign == "1");
    }
    if (!t.check_invariants()) {
        throw std::invalid_argument("tableau dump: rows are not a symplectic basis");
    }
    return t;
}

StabilizerTableau StabilizerTableau::parse(const std::string& text) {
    std::istringstream ss(text);
    return parse(ss);
}

}  // namespace scrambling
