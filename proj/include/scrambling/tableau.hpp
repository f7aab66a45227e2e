#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scrambling/circuit.hpp"
#include "scrambling/pauli.hpp"

namespace scrambling {

/// Stabilizer state of n qubits with destabilizers. Rows 0..n-1 are the
/// destabilizers, rows n..2n-1 the stabilizers; destabilizer i anticommutes
/// with stabilizer i only. Storage is column-major (one bitset over the 2n
/// rows per qubit and Pauli component) so a gate updates all rows with word
/// operations.
class StabilizerTableau {
   public:
    StabilizerTableau() = default;
    /// |0...0>: destabilizers X_i, stabilizers Z_i.
    explicit StabilizerTableau(uint32_t n);

    static StabilizerTableau all_zero(uint32_t n) { return StabilizerTableau(n); }
    /// Bell pairs (|00> + |11>)/sqrt2 on each listed pair, |0> elsewhere.
    static StabilizerTableau bell_pairs(uint32_t n, std::span<const Edge> pairs);
    /// m Bell pairs on (0,1), (2,3), ...; requires m <= n/2.
    static StabilizerTableau bell_pairs(uint32_t n, uint32_t m);
    /// State stabilized by the given independent commuting generators (sign
    /// bit true means -P). Destabilizers are completed by GF(2) elimination.
    static StabilizerTableau from_stabilizers(const std::vector<PauliString>& generators,
                                              const std::vector<bool>& negative = {});

    uint32_t num_qubits() const { return n_; }

    void apply(const Gate& gate);
    void apply(const GateList& gates);
    void apply(const LayeredCircuit& circuit);

    PauliString row(uint32_t r) const;
    bool x_bit(uint32_t r, uint32_t q) const { return bit(xs_, r, q); }
    bool z_bit(uint32_t r, uint32_t q) const { return bit(zs_, r, q); }
    bool row_sign(uint32_t r) const { return (signs_[r >> 6] >> (r & 63)) & 1; }
    PauliString stabilizer(uint32_t i) const { return row(n_ + i); }
    bool stabilizer_sign(uint32_t i) const { return row_sign(n_ + i); }
    PauliString destabilizer(uint32_t i) const { return row(i); }
    std::vector<PauliString> stabilizers() const;

    /// Symplectic-basis check: stabilizers commute pairwise, destabilizers
    /// commute pairwise, destabilizer i anticommutes exactly with stabilizer i.
    bool check_invariants() const;

    /// Header "n=<n>" then 2n lines "<xbits> <zbits> <sign>", destabilizers first.
    void dump(std::ostream& out) const;
    std::string dump() const;
    static StabilizerTableau parse(std::istream& in);
    static StabilizerTableau parse(const std::string& text);

    bool operator==(const StabilizerTableau&) const = default;

   private:
    bool bit(const std::vector<uint64_t>& cols, uint32_t r, uint32_t q) const {
        return (cols[q * words_ + (r >> 6)] >> (r & 63)) & 1;
    }
    void set_bit(std::vector<uint64_t>& cols, uint32_t r, uint32_t q, bool v);
    void set_row(uint32_t r, const PauliString& p, bool negative);

    uint32_t n_ = 0;
    uint32_t words_ = 0;  // words per column, covering 2n rows
    std::vector<uint64_t> xs_;
    std::vector<uint64_t> zs_;
    std::vector<uint64_t> signs_;
};

}  // namespace scrambling
