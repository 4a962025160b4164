#include "pqeval/kyber.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

#include "pqeval/keccak.hpp"

namespace pqeval::kyber {

namespace {

constexpr size_t kPolyBytes = 384;
constexpr size_t kSymBytes = 32;
constexpr size_t kMsgBytes = 32;

constexpr const KemParams kParamSets[3] = {
    {"Kyber512", 2, 1, 3, 2, 10, 4, 800, 1632, 768, 32, 32},
    {"Kyber768", 3, 3, 2, 2, 10, 4, 1184, 2400, 1088, 32, 32},
    {"Kyber1024", 4, 5, 2, 2, 11, 5, 1568, 3168, 1568, 32, 32},
};

constexpr uint16_t mulq(uint32_t a, uint32_t b) { return uint16_t(a * b % Q); }
constexpr uint16_t addq(uint16_t a, uint16_t b) { return uint16_t((a + b) % Q); }
constexpr uint16_t subq(uint16_t a, uint16_t b) { return uint16_t((a + Q - b) % Q); }

constexpr int bitrev7(int k) {
    int r = 0;
    for (int b = 0; b < 7; b++) {
        r = (r << 1) | ((k >> b) & 1);
    }
    return r;
}

// zetas[k] = 17^bitrev7(k) mod q, the reference twiddle schedule without its
// Montgomery factor.
constexpr std::array<uint16_t, 128> make_zetas() {
    std::array<uint16_t, 128> z{};
    for (int k = 0; k < 128; k++) {
        uint16_t v = 1;
        for (int e = 0; e < bitrev7(k); e++) {
            v = mulq(v, 17);
        }
        z[k] = v;
    }
    return z;
}

constexpr std::array<uint16_t, 128> kZetas = make_zetas();
constexpr uint16_t kInv128 = 3303;  // 128^-1 mod q

void check_len(ByteView buf, size_t expect, const char* what) {
    if (buf.size() != expect) {
        throw std::invalid_argument(std::string(what) + ": expected " +
                                    std::to_string(expect) + " bytes, got " +
                                    std::to_string(buf.size()));
    }
}

// --- symmetric primitives (FIPS 202 instantiation of the round-3 scheme) ---

Bytes hash_h(ByteView in) { return sha3_256(in); }
Bytes hash_g(ByteView in) { return sha3_512(in); }

Bytes prf(ByteView key32, uint8_t nonce, size_t outlen) {
    Bytes in(key32.begin(), key32.end());
    in.push_back(nonce);
    return shake256(in, outlen);
}

Bytes kdf(ByteView in) { return shake256(in, kSymBytes); }

// --- serialization ---

void poly_tobytes_at(const KPoly& a, uint8_t* r) {
    for (int i = 0; i < N / 2; i++) {
        uint16_t t0 = a[2 * i];
        uint16_t t1 = a[2 * i + 1];
        r[3 * i + 0] = uint8_t(t0 >> 0);
        r[3 * i + 1] = uint8_t((t0 >> 8) | (t1 << 4));
        r[3 * i + 2] = uint8_t(t1 >> 4);
    }
}

KPoly poly_frombytes_at(const uint8_t* a) {
    KPoly r;
    for (int i = 0; i < N / 2; i++) {
        r[2 * i + 0] = uint16_t(((a[3 * i + 0] >> 0) | (uint16_t(a[3 * i + 1]) << 8)) & 0xFFF);
        r[2 * i + 1] = uint16_t(((a[3 * i + 1] >> 4) | (uint16_t(a[3 * i + 2]) << 4)) & 0xFFF);
    }
    return r;
}

// d = 4: pairs of nibbles, 128 bytes per poly.
void poly_compress4(const KPoly& a, uint8_t* r) {
    for (int i = 0; i < N / 2; i++) {
        uint8_t lo = uint8_t(compress(a[2 * i], 4));
        uint8_t hi = uint8_t(compress(a[2 * i + 1], 4));
        r[i] = uint8_t(lo | (hi << 4));
    }
}

KPoly poly_decompress4(const uint8_t* a) {
    KPoly r;
    for (int i = 0; i < N / 2; i++) {
        r[2 * i + 0] = decompress(a[i] & 15, 4);
        r[2 * i + 1] = decompress(a[i] >> 4, 4);
    }
    return r;
}

// d = 5: 8 coefficients into 5 bytes, 160 bytes per poly.
void poly_compress5(const KPoly& a, uint8_t* r) {
    for (int i = 0; i < N / 8; i++) {
        uint8_t t[8];
        for (int j = 0; j < 8; j++) {
            t[j] = uint8_t(compress(a[8 * i + j], 5));
        }
        r[0] = uint8_t((t[0] >> 0) | (t[1] << 5));
        r[1] = uint8_t((t[1] >> 3) | (t[2] << 2) | (t[3] << 7));
        r[2] = uint8_t((t[3] >> 1) | (t[4] << 4));
        r[3] = uint8_t((t[4] >> 4) | (t[5] << 1) | (t[6] << 6));
        r[4] = uint8_t((t[6] >> 2) | (t[7] << 3));
        r += 5;
    }
}

KPoly poly_decompress5(const uint8_t* a) {
    KPoly r;
    for (int i = 0; i < N / 8; i++) {
        uint8_t t[8];
        t[0] = uint8_t(a[0] >> 0);
        t[1] = uint8_t((a[0] >> 5) | (a[1] << 3));
        t[2] = uint8_t(a[1] >> 2);
        t[3] = uint8_t((a[1] >> 7) | (a[2] << 1));
        t[4] = uint8_t((a[2] >> 4) | (a[3] << 4));
        t[5] = uint8_t(a[3] >> 1);
        t[6] = uint8_t((a[3] >> 6) | (a[4] << 2));
        t[7] = uint8_t(a[4] >> 3);
        a += 5;
        for (int j = 0; j < 8; j++) {
            r[8 * i + j] = decompress(t[j] & 31, 5);
        }
    }
    return r;
}

// d = 10: 4 coefficients into 5 bytes, 320 bytes per poly.
void poly_compress10(const KPoly& a, uint8_t* r) {
    for (int i = 0; i < N / 4; i++) {
        uint16_t t[4];
        for (int j = 0; j < 4; j++) {
            t[j] = compress(a[4 * i + j], 10);
        }
        r[0] = uint8_t(t[0] >> 0);
        r[1] = uint8_t((t[0] >> 8) | (t[1] << 2));
        r[2] = uint8_t((t[1] >> 6) | (t[2] << 4));
        r[3] = uint8_t((t[2] >> 4) | (t[3] << 6));
        r[4] = uint8_t(t[3] >> 2);
        r += 5;
    }
}

KPoly poly_decompress10(const uint8_t* a) {
    KPoly r;
    for (int i = 0; i < N / 4; i++) {
        uint16_t t[4];
        t[0] = uint16_t((a[0] >> 0) | (uint16_t(a[1]) << 8));
        t[1] = uint16_t((a[1] >> 2) | (uint16_t(a[2]) << 6));
        t[2] = uint16_t((a[2] >> 4) | (uint16_t(a[3]) << 4));
        t[3] = uint16_t((a[3] >> 6) | (uint16_t(a[4]) << 2));
        a += 5;
        for (int j = 0; j < 4; j++) {
            r[4 * i + j] = decompress(t[j] & 0x3FF, 10);
        }
    }
    return r;
}

// d = 11: 8 coefficients into 11 bytes, 352 bytes per poly.
void poly_compress11(const KPoly& a, uint8_t* r) {
    for (int i = 0; i < N / 8; i++) {
        uint16_t t[8];
        for (int j = 0; j < 8; j++) {
            t[j] = compress(a[8 * i + j], 11);
        }
        r[0] = uint8_t(t[0] >> 0);
        r[1] = uint8_t((t[0] >> 8) | (t[1] << 3));
        r[2] = uint8_t((t[1] >> 5) | (t[2] << 6));
        r[3] = uint8_t(t[2] >> 2);
        r[4] = uint8_t((t[2] >> 10) | (t[3] << 1));
        r[5] = uint8_t((t[3] >> 7) | (t[4] << 4));
        r[6] = uint8_t((t[4] >> 4) | (t[5] << 7));
        r[7] = uint8_t(t[5] >> 1);
        r[8] = uint8_t((t[5] >> 9) | (t[6] << 2));
        r[9] = uint8_t((t[6] >> 6) | (t[7] << 5));
        r[10] = uint8_t(t[7] >> 3);
        r += 11;
    }
}

KPoly poly_decompress11(const uint8_t* a) {
    KPoly r;
    for (int i = 0; i < N / 8; i++) {
        uint16_t t[8];
        t[0] = uint16_t((a[0] >> 0) | (uint16_t(a[1]) << 8));
        t[1] = uint16_t((a[1] >> 3) | (uint16_t(a[2]) << 5));
        t[2] = uint16_t((a[2] >> 6) | (uint16_t(a[3]) << 2) | (uint16_t(a[4]) << 10));
        t[3] = uint16_t((a[4] >> 1) | (uint16_t(a[5]) << 7));
        t[4] = uint16_t((a[5] >> 4) | (uint16_t(a[6]) << 4));
        t[5] = uint16_t((a[6] >> 7) | (uint16_t(a[7]) << 1) | (uint16_t(a[8]) << 9));
        t[6] = uint16_t((a[8] >> 2) | (uint16_t(a[9]) << 6));
        t[7] = uint16_t((a[9] >> 5) | (uint16_t(a[10]) << 3));
        a += 11;
        for (int j = 0; j < 8; j++) {
            r[8 * i + j] = decompress(t[j] & 0x7FF, 11);
        }
    }
    return r;
}

void polyvec_compress(const KPolyVec& a, int du, uint8_t* r) {
    size_t stride = size_t(du) * N / 8;
    for (size_t i = 0; i < a.size(); i++) {
        if (du == 10) {
            poly_compress10(a[i], r + i * stride);
        } else {
            poly_compress11(a[i], r + i * stride);
        }
    }
}

KPolyVec polyvec_decompress(const uint8_t* a, int k, int du) {
    size_t stride = size_t(du) * N / 8;
    KPolyVec r(k);
    for (int i = 0; i < k; i++) {
        r[i] = du == 10 ? poly_decompress10(a + i * stride) : poly_decompress11(a + i * stride);
    }
    return r;
}

KPoly poly_frommsg(const uint8_t msg[kMsgBytes]) {
    KPoly r;
    for (int i = 0; i < N / 8; i++) {
        for (int j = 0; j < 8; j++) {
            r[8 * i + j] = ((msg[i] >> j) & 1) ? uint16_t((Q + 1) / 2) : 0;
        }
    }
    return r;
}

void poly_tomsg(const KPoly& a, uint8_t msg[kMsgBytes]) {
    for (int i = 0; i < N / 8; i++) {
        msg[i] = 0;
        for (int j = 0; j < 8; j++) {
            msg[i] |= uint8_t(compress(a[8 * i + j], 1) << j);
        }
    }
}

// --- ring arithmetic helpers ---

KPoly poly_add(const KPoly& a, const KPoly& b) {
    KPoly r;
    for (int i = 0; i < N; i++) {
        r[i] = addq(a[i], b[i]);
    }
    return r;
}

KPoly poly_sub(const KPoly& a, const KPoly& b) {
    KPoly r;
    for (int i = 0; i < N; i++) {
        r[i] = subq(a[i], b[i]);
    }
    return r;
}

// sum_j basemul(a[j], b[j]) for NTT-domain vectors.
KPoly basemul_acc(const std::vector<KPoly>& row, const KPolyVec& v) {
    KPoly acc{};
    for (size_t j = 0; j < v.size(); j++) {
        acc = poly_add(acc, basemul(row[j], v[j]));
    }
    return acc;
}

KPoly getnoise(ByteView seed, uint8_t nonce, int eta) {
    return cbd(eta, prf(seed, nonce, size_t(eta) * N / 4));
}

// --- IND-CPA core ---

struct CpaKeypair {
    Bytes pk;  // packed NTT(t) || rho
    Bytes sk;  // packed NTT(s)
};

CpaKeypair indcpa_keypair(ByteView seed32, const KemParams& p) {
    int k = p.kyber_k;
    Bytes buf = hash_g(seed32);
    ByteView publicseed(buf.data(), kSymBytes);
    ByteView noiseseed(buf.data() + kSymBytes, kSymBytes);

    std::vector<KPoly> a = gen_matrix(publicseed, k, false);
    KPolyVec skpv(k), e(k);
    uint8_t nonce = 0;
    for (int i = 0; i < k; i++) {
        skpv[i] = getnoise(noiseseed, nonce++, p.eta1);
    }
    for (int i = 0; i < k; i++) {
        e[i] = getnoise(noiseseed, nonce++, p.eta1);
    }
    for (int i = 0; i < k; i++) {
        skpv[i] = ntt(skpv[i]);
        e[i] = ntt(e[i]);
    }
    KPolyVec pkpv(k);
    for (int i = 0; i < k; i++) {
        std::vector<KPoly> row(a.begin() + i * k, a.begin() + (i + 1) * k);
        pkpv[i] = poly_add(basemul_acc(row, skpv), e[i]);
    }

    CpaKeypair out;
    out.sk.resize(size_t(k) * kPolyBytes);
    out.pk.resize(size_t(k) * kPolyBytes + kSymBytes);
    for (int i = 0; i < k; i++) {
        poly_tobytes_at(skpv[i], out.sk.data() + size_t(i) * kPolyBytes);
        poly_tobytes_at(pkpv[i], out.pk.data() + size_t(i) * kPolyBytes);
    }
    std::memcpy(out.pk.data() + size_t(k) * kPolyBytes, publicseed.data(), kSymBytes);
    return out;
}

Bytes indcpa_enc(ByteView m, ByteView pk, ByteView coins32, const KemParams& p) {
    int k = p.kyber_k;
    KPolyVec pkpv(k);
    for (int i = 0; i < k; i++) {
        pkpv[i] = poly_frombytes_at(pk.data() + size_t(i) * kPolyBytes);
    }
    ByteView seed(pk.data() + size_t(k) * kPolyBytes, kSymBytes);

    KPoly kp = poly_frommsg(m.data());
    std::vector<KPoly> at = gen_matrix(seed, k, true);
    KPolyVec sp(k), ep(k);
    uint8_t nonce = 0;
    for (int i = 0; i < k; i++) {
        sp[i] = getnoise(coins32, nonce++, p.eta1);
    }
    for (int i = 0; i < k; i++) {
        ep[i] = getnoise(coins32, nonce++, p.eta2);
    }
    KPoly epp = getnoise(coins32, nonce++, p.eta2);
    for (int i = 0; i < k; i++) {
        sp[i] = ntt(sp[i]);
    }

    KPolyVec b(k);
    for (int i = 0; i < k; i++) {
        std::vector<KPoly> row(at.begin() + i * k, at.begin() + (i + 1) * k);
        b[i] = poly_add(inv_ntt(basemul_acc(row, sp)), ep[i]);
    }
    KPoly v = poly_add(poly_add(inv_ntt(basemul_acc(pkpv, sp)), epp), kp);

    Bytes ct(p.ct_len);
    size_t vec_bytes = size_t(p.du) * N / 8 * k;
    polyvec_compress(b, p.du, ct.data());
    if (p.dv == 4) {
        poly_compress4(v, ct.data() + vec_bytes);
    } else {
        poly_compress5(v, ct.data() + vec_bytes);
    }
    return ct;
}

void indcpa_dec(uint8_t m[kMsgBytes], ByteView ct, ByteView sk, const KemParams& p) {
    int k = p.kyber_k;
    size_t vec_bytes = size_t(p.du) * N / 8 * k;
    KPolyVec b = polyvec_decompress(ct.data(), k, p.du);
    KPoly v = p.dv == 4 ? poly_decompress4(ct.data() + vec_bytes)
                        : poly_decompress5(ct.data() + vec_bytes);
    KPolyVec skpv(k);
    for (int i = 0; i < k; i++) {
        skpv[i] = poly_frombytes_at(sk.data() + size_t(i) * kPolyBytes);
    }
    for (int i = 0; i < k; i++) {
        b[i] = ntt(b[i]);
    }
    KPoly mp = poly_sub(v, inv_ntt(basemul_acc(skpv, b)));
    poly_tomsg(mp, m);
}

// 0 if equal, 1 otherwise, without data-dependent branching.
uint8_t ct_differ(const uint8_t* a, const uint8_t* b, size_t n) {
    uint8_t d = 0;
    for (size_t i = 0; i < n; i++) {
        d |= uint8_t(a[i] ^ b[i]);
    }
    return uint8_t((uint16_t(d) + 0xFF) >> 8);
}

void ct_select(uint8_t* r, const uint8_t* alt, size_t n, uint8_t pick_alt) {
    uint8_t mask = uint8_t(-pick_alt);
    for (size_t i = 0; i < n; i++) {
        r[i] = uint8_t(r[i] ^ (mask & (r[i] ^ alt[i])));
    }
}

}  // namespace

const KemParams& params_for_level(int nist_level) {
    for (const auto& p : kParamSets) {
        if (p.nist_level == nist_level) {
            return p;
        }
    }
    throw std::invalid_argument("no Kyber parameter set for NIST level " +
                                std::to_string(nist_level));
}

KPoly ntt(const KPoly& p) {
    KPoly r = p;
    int k = 1;
    for (int len = 128; len >= 2; len >>= 1) {
        for (int start = 0; start < N; start += 2 * len) {
            uint16_t zeta = kZetas[k++];
            for (int j = start; j < start + len; j++) {
                uint16_t t = mulq(zeta, r[j + len]);
                r[j + len] = subq(r[j], t);
                r[j] = addq(r[j], t);
            }
        }
    }
    return r;
}

KPoly inv_ntt(const KPoly& p) {
    KPoly r = p;
    int k = 127;
    for (int len = 2; len <= 128; len <<= 1) {
        for (int start = 0; start < N; start += 2 * len) {
            uint16_t zeta = kZetas[k--];
            for (int j = start; j < start + len; j++) {
                uint16_t t = r[j];
                r[j] = addq(t, r[j + len]);
                r[j + len] = mulq(zeta, subq(r[j + len], t));
            }
        }
    }
    for (int j = 0; j < N; j++) {
        r[j] = mulq(r[j], kInv128);
    }
    return r;
}

KPoly basemul(const KPoly& a, const KPoly& b) {
    KPoly r;
    for (int i = 0; i < N / 4; i++) {
        uint16_t zeta = kZetas[64 + i];
        for (int half = 0; half < 2; half++) {
            int off = 4 * i + 2 * half;
            uint16_t z = half == 0 ? zeta : subq(0, zeta);
            uint16_t a0 = a[off], a1 = a[off + 1];
            uint16_t b0 = b[off], b1 = b[off + 1];
            r[off] = addq(mulq(a0, b0), mulq(z, mulq(a1, b1)));
            r[off + 1] = addq(mulq(a0, b1), mulq(a1, b0));
        }
    }
    return r;
}

KPoly cbd(int eta, ByteView buf) {
    if (eta != 2 && eta != 3) {
        throw std::invalid_argument("cbd: eta must be 2 or 3");
    }
    check_len(buf, size_t(eta) * N / 4, "cbd buffer");
    KPoly r;
    if (eta == 2) {
        for (int i = 0; i < N / 8; i++) {
            uint32_t t = uint32_t(buf[4 * i]) | (uint32_t(buf[4 * i + 1]) << 8) |
                         (uint32_t(buf[4 * i + 2]) << 16) | (uint32_t(buf[4 * i + 3]) << 24);
            uint32_t d = (t & 0x55555555u) + ((t >> 1) & 0x55555555u);
            for (int j = 0; j < 8; j++) {
                uint16_t a = (d >> (4 * j)) & 3;
                uint16_t b = (d >> (4 * j + 2)) & 3;
                r[8 * i + j] = subq(a, b);
            }
        }
    } else {
        for (int i = 0; i < N / 4; i++) {
            uint32_t t = uint32_t(buf[3 * i]) | (uint32_t(buf[3 * i + 1]) << 8) |
                         (uint32_t(buf[3 * i + 2]) << 16);
            uint32_t d = (t & 0x00249249u) + ((t >> 1) & 0x00249249u) + ((t >> 2) & 0x00249249u);
            for (int j = 0; j < 4; j++) {
                uint16_t a = (d >> (6 * j)) & 7;
                uint16_t b = (d >> (6 * j + 3)) & 7;
                r[4 * i + j] = subq(a, b);
            }
        }
    }
    return r;
}

std::vector<KPoly> gen_matrix(ByteView rho, int k, bool transposed) {
    check_len(rho, kSymBytes, "gen_matrix seed");
    // Enough SHAKE128 blocks for the expected 12-bit rejection yield, then
    // one-block refills; a 168-byte block is a whole number of 3-byte groups,
    // so refills never split a candidate.
    constexpr size_t kXofBlock = 168;
    constexpr size_t kInitBlocks = (12 * N / 8 * 4096 / Q + kXofBlock) / kXofBlock;

    std::vector<KPoly> a(size_t(k) * k);
    for (int i = 0; i < k; i++) {
        for (int j = 0; j < k; j++) {
            KeccakSponge xof(kXofBlock, 0x1f);
            xof.absorb(rho);
            uint8_t idx[2] = {uint8_t(transposed ? i : j), uint8_t(transposed ? j : i)};
            xof.absorb(ByteView(idx, 2));

            KPoly& poly = a[size_t(i) * k + j];
            uint8_t buf[kInitBlocks * kXofBlock];
            size_t buflen = kInitBlocks * kXofBlock;
            xof.squeeze(buf, buflen);
            size_t ctr = 0, pos = 0;
            while (true) {
                while (ctr < N && pos + 3 <= buflen) {
                    uint16_t v0 = uint16_t((buf[pos] | (uint16_t(buf[pos + 1]) << 8)) & 0xFFF);
                    uint16_t v1 = uint16_t(((buf[pos + 1] >> 4) | (uint16_t(buf[pos + 2]) << 4)) & 0xFFF);
                    pos += 3;
                    if (v0 < Q) {
                        poly[ctr++] = v0;
                    }
                    if (ctr < N && v1 < Q) {
                        poly[ctr++] = v1;
                    }
                }
                if (ctr == N) {
                    break;
                }
                xof.squeeze(buf, kXofBlock);
                buflen = kXofBlock;
                pos = 0;
            }
        }
    }
    return a;
}

uint16_t compress(uint16_t x, int d) {
    return uint16_t(((uint32_t(x) << d) + (Q - 1) / 2) / Q) & uint16_t((1u << d) - 1);
}

uint16_t decompress(uint16_t y, int d) {
    return uint16_t((uint32_t(y & ((1u << d) - 1)) * Q + (1u << (d - 1))) >> d);
}

std::array<uint8_t, 384> poly_to_bytes(const KPoly& a) {
    std::array<uint8_t, 384> r;
    poly_tobytes_at(a, r.data());
    return r;
}

KPoly poly_from_bytes(const uint8_t bytes[384]) { return poly_frombytes_at(bytes); }

std::pair<Bytes, Bytes> kem_keygen(ByteView coins, const KemParams& p) {
    check_len(coins, 64, "kem_keygen coins");
    CpaKeypair cpa = indcpa_keypair(coins.first(kSymBytes), p);

    Bytes sk = cpa.sk;
    sk.insert(sk.end(), cpa.pk.begin(), cpa.pk.end());
    Bytes hpk = hash_h(cpa.pk);
    sk.insert(sk.end(), hpk.begin(), hpk.end());
    sk.insert(sk.end(), coins.begin() + kSymBytes, coins.end());
    return {std::move(cpa.pk), std::move(sk)};
}

std::pair<Bytes, Bytes> kem_enc_derand(ByteView pk, ByteView coins, const KemParams& p) {
    check_len(pk, p.pk_len, "kem_enc_derand pk");
    check_len(coins, p.coins_len, "kem_enc_derand coins");

    // buf = H(coins) || H(pk); (pre-key, cpa coins) = G(buf)
    Bytes buf = hash_h(coins);
    Bytes hpk = hash_h(pk);
    buf.insert(buf.end(), hpk.begin(), hpk.end());
    Bytes kr = hash_g(buf);

    Bytes ct = indcpa_enc(ByteView(buf.data(), kMsgBytes), pk,
                          ByteView(kr.data() + kSymBytes, kSymBytes), p);
    Bytes hc = hash_h(ct);
    std::memcpy(kr.data() + kSymBytes, hc.data(), kSymBytes);
    Bytes ss = kdf(kr);
    return {std::move(ct), std::move(ss)};
}

Bytes kem_dec(ByteView sk, ByteView ct, const KemParams& p) {
    check_len(sk, p.sk_len, "kem_dec sk");
    check_len(ct, p.ct_len, "kem_dec ct");
    size_t cpa_sk_len = size_t(p.kyber_k) * kPolyBytes;
    ByteView pk(sk.data() + cpa_sk_len, p.pk_len);
    ByteView hpk(sk.data() + p.sk_len - 2 * kSymBytes, kSymBytes);
    ByteView z(sk.data() + p.sk_len - kSymBytes, kSymBytes);

    Bytes buf(2 * kSymBytes);
    indcpa_dec(buf.data(), ct, sk, p);
    std::memcpy(buf.data() + kSymBytes, hpk.data(), kSymBytes);
    Bytes kr = hash_g(buf);

    Bytes cmp = indcpa_enc(ByteView(buf.data(), kMsgBytes), pk,
                           ByteView(kr.data() + kSymBytes, kSymBytes), p);
    uint8_t fail = ct_differ(ct.data(), cmp.data(), p.ct_len);

    Bytes hc = hash_h(ct);
    std::memcpy(kr.data() + kSymBytes, hc.data(), kSymBytes);
    ct_select(kr.data(), z.data(), kSymBytes, fail);
    return kdf(kr);
}

}  // namespace pqeval::kyber
