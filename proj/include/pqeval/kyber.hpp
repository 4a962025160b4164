#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "pqeval/bytes.hpp"

namespace pqeval::kyber {

inline constexpr int N = 256;
inline constexpr int Q = 3329;

// One parameter-set record per security level; returned by params_for_level.
struct KemParams {
    const char* name;
    int kyber_k;     // module rank, 2/3/4
    int nist_level;  // 1/3/5
    int eta1;
    int eta2;
    int du;  // polyvec compression width (bits)
    int dv;  // poly compression width (bits)
    size_t pk_len;
    size_t sk_len;
    size_t ct_len;
    size_t ss_len;     // always 32
    size_t coins_len;  // always 32 (raw pre-hash randomness for encapsulation)
};

// Levels 1, 3, 5. Throws std::invalid_argument otherwise.
const KemParams& params_for_level(int nist_level);

// Coefficients are kept canonical in [0, Q) everywhere.
using KPoly = std::array<uint16_t, N>;
using KPolyVec = std::vector<KPoly>;

// Forward/inverse negacyclic NTT, 7 layers, output order as serialized by the
// round-3 reference. inv_ntt folds in the 1/128 factor so inv_ntt(ntt(p)) == p.
KPoly ntt(const KPoly& p);
KPoly inv_ntt(const KPoly& p);

// Product of two NTT-domain polynomials: 128 length-2 base multiplications.
KPoly basemul(const KPoly& a, const KPoly& b);

// Centered binomial sampler; buf must be exactly 64*eta bytes, eta 2 or 3.
// Negative draws are mapped into [0, Q).
KPoly cbd(int eta, ByteView buf);

// A (or A^T) expanded from rho by SHAKE128 rejection sampling; element (i, j)
// is row-major at [i*k + j].
std::vector<KPoly> gen_matrix(ByteView rho, int k, bool transposed);

// compress = round(2^d x / q) mod 2^d; decompress = round(q y / 2^d).
uint16_t compress(uint16_t x, int d);
uint16_t decompress(uint16_t y, int d);

// 12-bit little-endian coefficient packing (384 bytes).
std::array<uint8_t, 384> poly_to_bytes(const KPoly& a);
KPoly poly_from_bytes(const uint8_t bytes[384]);

// coins = 32-byte CPA keypair seed || 32-byte implicit-rejection secret z.
std::pair<Bytes, Bytes> kem_keygen(ByteView coins, const KemParams& p);  // (pk, sk)

// coins is the raw 32-byte randomness buffer; it is hashed internally, so the
// caller feeds DRBG output directly, as the KAT flow does.
std::pair<Bytes, Bytes> kem_enc_derand(ByteView pk, ByteView coins,
                                       const KemParams& p);  // (ct, ss)

// Implicit rejection: a mismatched ciphertext yields the z-derived secret,
// never an error.
Bytes kem_dec(ByteView sk, ByteView ct, const KemParams& p);

}  // namespace pqeval::kyber
