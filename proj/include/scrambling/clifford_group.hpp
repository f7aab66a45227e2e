#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace scrambling {

/// Order of the two-qubit Clifford group modulo global phase: 720 symplectic
/// matrices over GF(2)^4 times 16 sign patterns.
inline constexpr uint32_t kTwoQubitCliffordCount = 11520;

/// Local two-qubit Pauli code used by the gate tables. Bit 0 = x on the first
/// gate qubit, bit 1 = z on the first, bit 2 = x on the second, bit 3 = z on
/// the second. The Pauli for a code is the Hermitian tensor product of
/// single-qubit I, X, Y=iXZ, Z.
using LocalPauli = uint8_t;

/// Conjugation action of one two-qubit Clifford U: U P(v) U^dagger = (-1)^sign[v] P(image[v]).
struct TwoQubitCliffordAction {
    std::array<LocalPauli, 4> generator_images{};  // images of X_a, Z_a, X_b, Z_b
    uint8_t generator_signs = 0;                   // bit k = sign of generator_images[k]
    std::array<LocalPauli, 16> image{};
    std::array<uint8_t, 16> sign{};
    /// Algebraic normal form of v -> sign[v]; bit m set means the monomial
    /// prod_{k in m} v_k contributes.
    uint16_t sign_anf = 0;
    /// Output bit k' of the image is the parity of (input & column_mask[k']).
    std::array<uint8_t, 4> column_mask{};
};

/// Canonical enumeration of the two-qubit Clifford group. Index =
/// 16 * symplectic_index + generator_signs, with symplectic matrices sorted
/// lexicographically by (image XOR identity image), so index 0 is the
/// identity gate.
class TwoQubitCliffordTable {
   public:
    static const TwoQubitCliffordTable& instance();

    const TwoQubitCliffordAction& operator[](uint32_t clifford_id) const;
    uint32_t size() const { return static_cast<uint32_t>(actions_.size()); }

    /// Inverse of the enumeration. Throws if the images are not a symplectic basis.
    uint32_t id_of(const std::array<LocalPauli, 4>& generator_images, uint8_t generator_signs) const;

   private:
    TwoQubitCliffordTable();
    std::vector<TwoQubitCliffordAction> actions_;
    std::vector<int32_t> symplectic_index_;  // keyed by packed 16-bit images
};

/// Symplectic form on local two-qubit Pauli codes.
constexpr unsigned local_symplectic_product(LocalPauli u, LocalPauli v) {
    unsigned a = ((u & 1) & ((v >> 1) & 1)) ^ (((u >> 1) & 1) & (v & 1));
    unsigned b = (((u >> 2) & 1) & ((v >> 3) & 1)) ^ (((u >> 3) & 1) & ((v >> 2) & 1));
    return a ^ b;
}

enum class NamedGate { Identity, H0, H1, S0, S1, CNOT01, CNOT10, CZ, SWAP, X0, Z0 };

/// Canonical clifford_id of a textbook gate on the (first, second) qubit pair.
uint32_t named_clifford_id(NamedGate gate);

}  // namespace scrambling
