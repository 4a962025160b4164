#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pqeval/bytes.hpp"

namespace pqeval::dilithium {

inline constexpr int N = 256;
inline constexpr int32_t Q = 8380417;
inline constexpr int D = 13;

// One parameter-set record per mode; returned by params_for_mode.
struct SigParams {
    const char* name;
    int mode;  // 2/3/5, doubles as the NIST level
    int k;
    int l;
    int eta;
    int tau;
    int beta;  // tau * eta
    int32_t gamma1;
    int32_t gamma2;
    int omega;
    size_t pk_len;
    size_t sk_len;
    size_t sig_len;
};

// Modes 2, 3, 5. Throws std::invalid_argument otherwise.
const SigParams& params_for_mode(int mode);

using DPoly = std::array<int32_t, N>;
using DPolyVec = std::vector<DPoly>;

// Clean-semantics ring transforms: inputs/outputs canonical in [0, Q), the
// Montgomery convention of the reference resolved so that composition is
// identity and pointwise products match schoolbook negacyclic convolution.
DPoly d_ntt(const DPoly& p);
DPoly d_inv_ntt(const DPoly& p);
DPoly pointwise(const DPoly& a, const DPoly& b);

// r = r1*2^13 + r0 with r0 in (-2^12, 2^12]; input canonical.
std::pair<int32_t, int32_t> power2round(int32_t r);  // (r1, r0)

// r = r1*(2*gamma2) + r0 with the q-1 wraparound case folded into r1 = 0;
// gamma2 must be (Q-1)/88 or (Q-1)/32.
std::pair<int32_t, int32_t> decompose(int32_t r, int32_t gamma2);  // (r1, r0)

bool make_hint(int32_t a0, int32_t a1, int32_t gamma2);
int32_t use_hint(int32_t r, bool hint, int32_t gamma2);

// Challenge polynomial: exactly tau coefficients set to +-1, derived from
// SHAKE256(seed). seed is 32 bytes.
DPoly sample_in_ball(ByteView seed, int tau);

// Deterministic keypair from a 32-byte seed (the KAT flow's randombytes draw).
std::pair<Bytes, Bytes> keygen(ByteView seed, const SigParams& p);  // (pk, sk)

struct SignResult {
    Bytes sm;             // signature || message
    uint32_t iterations;  // rejection-loop passes until accept
};

// Deterministic round-3 signing; loops until the rejection checks accept.
SignResult sign(ByteView sk, ByteView msg, const SigParams& p);

// Returns the embedded message, or nullopt on any rejection (malformed
// encoding, truncated input, norm/hint violations, challenge mismatch).
std::optional<Bytes> verify(ByteView pk, ByteView sm, const SigParams& p);

}  // namespace pqeval::dilithium
