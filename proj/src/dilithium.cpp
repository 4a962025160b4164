#include "pqeval/dilithium.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

#include "pqeval/keccak.hpp"

namespace pqeval::dilithium {

namespace {

constexpr int32_t QINV = 58728449;  // q^-1 mod 2^32
constexpr int32_t MONT = 4193792;   // 2^32 mod q
constexpr int32_t MONT_R2 = int32_t((int64_t(MONT) * MONT) % Q);
constexpr int32_t GAMMA2_88 = (Q - 1) / 88;
constexpr int32_t GAMMA2_32 = (Q - 1) / 32;
constexpr size_t kSeedBytes = 32;
constexpr size_t kCrhBytes = 64;

constexpr const SigParams kParamSets[3] = {
    {"Dilithium2", 2, 4, 4, 2, 39, 78, 1 << 17, GAMMA2_88, 80, 1312, 2528, 2420},
    {"Dilithium3", 3, 6, 5, 4, 49, 196, 1 << 19, GAMMA2_32, 55, 1952, 4000, 3293},
    {"Dilithium5", 5, 8, 7, 2, 60, 120, 1 << 19, GAMMA2_32, 75, 2592, 4864, 4595},
};

// Representative-exact reductions from the pinned reference: downstream
// rejection decisions depend on the exact values, not just the residue class.
int32_t montgomery_reduce(int64_t a) {
    int32_t t = int32_t(uint64_t(a) * uint64_t(QINV));
    return int32_t((a - int64_t(t) * Q) >> 32);
}

int32_t reduce32(int32_t a) {
    int32_t t = (a + (1 << 22)) >> 23;
    return a - t * Q;
}

int32_t caddq(int32_t a) { return a + ((a >> 31) & Q); }

int32_t freeze(int32_t a) { return caddq(reduce32(a)); }

constexpr int bitrev8(int k) {
    int r = 0;
    for (int b = 0; b < 8; b++) {
        r = (r << 1) | ((k >> b) & 1);
    }
    return r;
}

constexpr int32_t pow1753(int e) {
    int64_t r = 1, b = 1753;
    while (e > 0) {
        if (e & 1) {
            r = r * b % Q;
        }
        b = b * b % Q;
        e >>= 1;
    }
    return int32_t(r);
}

// zetas[k] = 2^32 * 1753^bitrev8(k) mod q, centered; entry 0 is never read.
constexpr std::array<int32_t, 256> make_zetas() {
    std::array<int32_t, 256> z{};
    for (int k = 1; k < 256; k++) {
        int64_t v = int64_t(MONT) * pow1753(bitrev8(k)) % Q;
        if (v > Q / 2) {
            v -= Q;
        }
        z[k] = int32_t(v);
    }
    return z;
}

constexpr std::array<int32_t, 256> kZetas = make_zetas();

// --- in-place lazy-reduction transforms (reference semantics) ---

void ntt_ip(DPoly& a) {
    int k = 0;
    for (int len = 128; len > 0; len >>= 1) {
        for (int start = 0; start < N; start += 2 * len) {
            int32_t zeta = kZetas[++k];
            for (int j = start; j < start + len; j++) {
                int32_t t = montgomery_reduce(int64_t(zeta) * a[j + len]);
                a[j + len] = a[j] - t;
                a[j] = a[j] + t;
            }
        }
    }
}

void invntt_tomont_ip(DPoly& a) {
    constexpr int32_t f = 41978;  // 2^64 / 256 mod q
    int k = 256;
    for (int len = 1; len < N; len <<= 1) {
        for (int start = 0; start < N; start += 2 * len) {
            int32_t zeta = -kZetas[--k];
            for (int j = start; j < start + len; j++) {
                int32_t t = a[j];
                a[j] = t + a[j + len];
                a[j + len] = t - a[j + len];
                a[j + len] = montgomery_reduce(int64_t(zeta) * a[j + len]);
            }
        }
    }
    for (int j = 0; j < N; j++) {
        a[j] = montgomery_reduce(int64_t(f) * a[j]);
    }
}

void reduce_ip(DPoly& a) {
    for (auto& c : a) {
        c = reduce32(c);
    }
}

void caddq_ip(DPoly& a) {
    for (auto& c : a) {
        c = caddq(c);
    }
}

void add_ip(DPoly& a, const DPoly& b) {
    for (int i = 0; i < N; i++) {
        a[i] += b[i];
    }
}

void sub_ip(DPoly& a, const DPoly& b) {
    for (int i = 0; i < N; i++) {
        a[i] -= b[i];
    }
}

DPoly pointwise_mont(const DPoly& a, const DPoly& b) {
    DPoly c;
    for (int i = 0; i < N; i++) {
        c[i] = montgomery_reduce(int64_t(a[i]) * b[i]);
    }
    return c;
}

// sum_i a_row[i] o v[i] in the Montgomery domain.
DPoly pointwise_acc_mont(const DPoly* a_row, const DPolyVec& v) {
    DPoly w = pointwise_mont(a_row[0], v[0]);
    for (size_t i = 1; i < v.size(); i++) {
        add_ip(w, pointwise_mont(a_row[i], v[i]));
    }
    return w;
}

// 1 if any |centered coefficient| >= bound; the sign must not leak, the index may.
bool chknorm(const DPoly& a, int32_t bound) {
    if (bound > (Q - 1) / 8) {
        return true;
    }
    for (int i = 0; i < N; i++) {
        int32_t t = a[i] >> 31;
        t = a[i] - (t & 2 * a[i]);
        if (t >= bound) {
            return true;
        }
    }
    return false;
}

bool vec_chknorm(const DPolyVec& v, int32_t bound) {
    for (const auto& p : v) {
        if (chknorm(p, bound)) {
            return true;
        }
    }
    return false;
}

// --- samplers ---

KeccakSponge stream128(ByteView seed, uint16_t nonce) {
    KeccakSponge s(168, 0x1f);
    s.absorb(seed);
    uint8_t n[2] = {uint8_t(nonce), uint8_t(nonce >> 8)};
    s.absorb(ByteView(n, 2));
    return s;
}

KeccakSponge stream256(ByteView seed, uint16_t nonce) {
    KeccakSponge s(136, 0x1f);
    s.absorb(seed);
    uint8_t n[2] = {uint8_t(nonce), uint8_t(nonce >> 8)};
    s.absorb(ByteView(n, 2));
    return s;
}

DPoly poly_uniform(ByteView rho, uint16_t nonce) {
    constexpr size_t kBlock = 168;
    constexpr size_t kBlocks = (768 + kBlock - 1) / kBlock;
    KeccakSponge xof = stream128(rho, nonce);
    // 24-bit candidates masked to 23 bits; block and initial buffer sizes are
    // multiples of 3, so refills never split a candidate.
    uint8_t buf[kBlocks * kBlock];
    size_t buflen = sizeof(buf);
    xof.squeeze(buf, buflen);
    DPoly a;
    size_t ctr = 0, pos = 0;
    while (true) {
        while (ctr < N && pos + 3 <= buflen) {
            uint32_t t = (uint32_t(buf[pos]) | (uint32_t(buf[pos + 1]) << 8) |
                          (uint32_t(buf[pos + 2]) << 16)) &
                         0x7FFFFF;
            pos += 3;
            if (t < uint32_t(Q)) {
                a[ctr++] = int32_t(t);
            }
        }
        if (ctr == N) {
            return a;
        }
        xof.squeeze(buf, kBlock);
        buflen = kBlock;
        pos = 0;
    }
}

DPoly poly_uniform_eta(ByteView rhoprime, uint16_t nonce, int eta) {
    constexpr size_t kBlock = 136;
    size_t buflen = eta == 2 ? kBlock : 2 * kBlock;  // expected rejection yield
    KeccakSponge xof = stream256(rhoprime, nonce);
    uint8_t buf[2 * kBlock];
    xof.squeeze(buf, buflen);
    DPoly a;
    size_t ctr = 0, pos = 0;
    while (true) {
        while (ctr < N && pos < buflen) {
            uint32_t t0 = buf[pos] & 0x0F;
            uint32_t t1 = buf[pos++] >> 4;
            if (eta == 2) {
                if (t0 < 15) {
                    t0 = t0 - (205 * t0 >> 10) * 5;
                    a[ctr++] = 2 - int32_t(t0);
                }
                if (t1 < 15 && ctr < N) {
                    t1 = t1 - (205 * t1 >> 10) * 5;
                    a[ctr++] = 2 - int32_t(t1);
                }
            } else {
                if (t0 < 9) {
                    a[ctr++] = 4 - int32_t(t0);
                }
                if (t1 < 9 && ctr < N) {
                    a[ctr++] = 4 - int32_t(t1);
                }
            }
        }
        if (ctr == N) {
            return a;
        }
        xof.squeeze(buf, kBlock);
        buflen = kBlock;
        pos = 0;
    }
}

// --- coefficient packing ---

size_t polyz_bytes(const SigParams& p) { return p.gamma1 == (1 << 17) ? 576 : 640; }
size_t polyw1_bytes(const SigParams& p) { return p.gamma2 == GAMMA2_88 ? 192 : 128; }
size_t polyeta_bytes(const SigParams& p) { return p.eta == 2 ? 96 : 128; }

void polyeta_pack(uint8_t* r, const DPoly& a, int eta) {
    if (eta == 2) {
        for (int i = 0; i < N / 8; i++) {
            uint8_t t[8];
            for (int j = 0; j < 8; j++) {
                t[j] = uint8_t(2 - a[8 * i + j]);
            }
            r[3 * i + 0] = uint8_t((t[0] >> 0) | (t[1] << 3) | (t[2] << 6));
            r[3 * i + 1] = uint8_t((t[2] >> 2) | (t[3] << 1) | (t[4] << 4) | (t[5] << 7));
            r[3 * i + 2] = uint8_t((t[5] >> 1) | (t[6] << 2) | (t[7] << 5));
        }
    } else {
        for (int i = 0; i < N / 2; i++) {
            uint8_t t0 = uint8_t(4 - a[2 * i + 0]);
            uint8_t t1 = uint8_t(4 - a[2 * i + 1]);
            r[i] = uint8_t(t0 | (t1 << 4));
        }
    }
}

DPoly polyeta_unpack(const uint8_t* a, int eta) {
    DPoly r;
    if (eta == 2) {
        for (int i = 0; i < N / 8; i++) {
            r[8 * i + 0] = (a[3 * i + 0] >> 0) & 7;
            r[8 * i + 1] = (a[3 * i + 0] >> 3) & 7;
            r[8 * i + 2] = ((a[3 * i + 0] >> 6) | (a[3 * i + 1] << 2)) & 7;
            r[8 * i + 3] = (a[3 * i + 1] >> 1) & 7;
            r[8 * i + 4] = (a[3 * i + 1] >> 4) & 7;
            r[8 * i + 5] = ((a[3 * i + 1] >> 7) | (a[3 * i + 2] << 1)) & 7;
            r[8 * i + 6] = (a[3 * i + 2] >> 2) & 7;
            r[8 * i + 7] = (a[3 * i + 2] >> 5) & 7;
            for (int j = 0; j < 8; j++) {
                r[8 * i + j] = 2 - r[8 * i + j];
            }
        }
    } else {
        for (int i = 0; i < N / 2; i++) {
            r[2 * i + 0] = 4 - int32_t(a[i] & 0x0F);
            r[2 * i + 1] = 4 - int32_t(a[i] >> 4);
        }
    }
    return r;
}

void polyt1_pack(uint8_t* r, const DPoly& a) {
    for (int i = 0; i < N / 4; i++) {
        r[5 * i + 0] = uint8_t(a[4 * i + 0] >> 0);
        r[5 * i + 1] = uint8_t((a[4 * i + 0] >> 8) | (a[4 * i + 1] << 2));
        r[5 * i + 2] = uint8_t((a[4 * i + 1] >> 6) | (a[4 * i + 2] << 4));
        r[5 * i + 3] = uint8_t((a[4 * i + 2] >> 4) | (a[4 * i + 3] << 6));
        r[5 * i + 4] = uint8_t(a[4 * i + 3] >> 2);
    }
}

DPoly polyt1_unpack(const uint8_t* a) {
    DPoly r;
    for (int i = 0; i < N / 4; i++) {
        r[4 * i + 0] = int32_t(((a[5 * i + 0] >> 0) | (uint32_t(a[5 * i + 1]) << 8)) & 0x3FF);
        r[4 * i + 1] = int32_t(((a[5 * i + 1] >> 2) | (uint32_t(a[5 * i + 2]) << 6)) & 0x3FF);
        r[4 * i + 2] = int32_t(((a[5 * i + 2] >> 4) | (uint32_t(a[5 * i + 3]) << 4)) & 0x3FF);
        r[4 * i + 3] = int32_t(((a[5 * i + 3] >> 6) | (uint32_t(a[5 * i + 4]) << 2)) & 0x3FF);
    }
    return r;
}

void polyt0_pack(uint8_t* r, const DPoly& a) {
    for (int i = 0; i < N / 8; i++) {
        uint32_t t[8];
        for (int j = 0; j < 8; j++) {
            t[j] = uint32_t((1 << (D - 1)) - a[8 * i + j]);
        }
        r[13 * i + 0] = uint8_t(t[0]);
        r[13 * i + 1] = uint8_t(t[0] >> 8) | uint8_t(t[1] << 5);
        r[13 * i + 2] = uint8_t(t[1] >> 3);
        r[13 * i + 3] = uint8_t(t[1] >> 11) | uint8_t(t[2] << 2);
        r[13 * i + 4] = uint8_t(t[2] >> 6) | uint8_t(t[3] << 7);
        r[13 * i + 5] = uint8_t(t[3] >> 1);
        r[13 * i + 6] = uint8_t(t[3] >> 9) | uint8_t(t[4] << 4);
        r[13 * i + 7] = uint8_t(t[4] >> 4);
        r[13 * i + 8] = uint8_t(t[4] >> 12) | uint8_t(t[5] << 1);
        r[13 * i + 9] = uint8_t(t[5] >> 7) | uint8_t(t[6] << 6);
        r[13 * i + 10] = uint8_t(t[6] >> 2);
        r[13 * i + 11] = uint8_t(t[6] >> 10) | uint8_t(t[7] << 3);
        r[13 * i + 12] = uint8_t(t[7] >> 5);
    }
}

DPoly polyt0_unpack(const uint8_t* a) {
    DPoly r;
    for (int i = 0; i < N / 8; i++) {
        uint32_t t[8];
        t[0] = (uint32_t(a[13 * i + 0]) | (uint32_t(a[13 * i + 1]) << 8)) & 0x1FFF;
        t[1] = (uint32_t(a[13 * i + 1] >> 5) | (uint32_t(a[13 * i + 2]) << 3) |
                (uint32_t(a[13 * i + 3]) << 11)) &
               0x1FFF;
        t[2] = (uint32_t(a[13 * i + 3] >> 2) | (uint32_t(a[13 * i + 4]) << 6)) & 0x1FFF;
        t[3] = (uint32_t(a[13 * i + 4] >> 7) | (uint32_t(a[13 * i + 5]) << 1) |
                (uint32_t(a[13 * i + 6]) << 9)) &
               0x1FFF;
        t[4] = (uint32_t(a[13 * i + 6] >> 4) | (uint32_t(a[13 * i + 7]) << 4) |
                (uint32_t(a[13 * i + 8]) << 12)) &
               0x1FFF;
        t[5] = (uint32_t(a[13 * i + 8] >> 1) | (uint32_t(a[13 * i + 9]) << 7)) & 0x1FFF;
        t[6] = (uint32_t(a[13 * i + 9] >> 6) | (uint32_t(a[13 * i + 10]) << 2) |
                (uint32_t(a[13 * i + 11]) << 10)) &
               0x1FFF;
        t[7] = (uint32_t(a[13 * i + 11] >> 3) | (uint32_t(a[13 * i + 12]) << 5)) & 0x1FFF;
        for (int j = 0; j < 8; j++) {
            r[8 * i + j] = (1 << (D - 1)) - int32_t(t[j]);
        }
    }
    return r;
}

void polyz_pack(uint8_t* r, const DPoly& a, int32_t gamma1) {
    if (gamma1 == (1 << 17)) {
        for (int i = 0; i < N / 4; i++) {
            uint32_t t[4];
            for (int j = 0; j < 4; j++) {
                t[j] = uint32_t(gamma1 - a[4 * i + j]);
            }
            r[9 * i + 0] = uint8_t(t[0]);
            r[9 * i + 1] = uint8_t(t[0] >> 8);
            r[9 * i + 2] = uint8_t(t[0] >> 16) | uint8_t(t[1] << 2);
            r[9 * i + 3] = uint8_t(t[1] >> 6);
            r[9 * i + 4] = uint8_t(t[1] >> 14) | uint8_t(t[2] << 4);
            r[9 * i + 5] = uint8_t(t[2] >> 4);
            r[9 * i + 6] = uint8_t(t[2] >> 12) | uint8_t(t[3] << 6);
            r[9 * i + 7] = uint8_t(t[3] >> 2);
            r[9 * i + 8] = uint8_t(t[3] >> 10);
        }
    } else {
        for (int i = 0; i < N / 2; i++) {
            uint32_t t0 = uint32_t(gamma1 - a[2 * i + 0]);
            uint32_t t1 = uint32_t(gamma1 - a[2 * i + 1]);
            r[5 * i + 0] = uint8_t(t0);
            r[5 * i + 1] = uint8_t(t0 >> 8);
            r[5 * i + 2] = uint8_t(t0 >> 16) | uint8_t(t1 << 4);
            r[5 * i + 3] = uint8_t(t1 >> 4);
            r[5 * i + 4] = uint8_t(t1 >> 12);
        }
    }
}

DPoly polyz_unpack(const uint8_t* a, int32_t gamma1) {
    DPoly r;
    if (gamma1 == (1 << 17)) {
        for (int i = 0; i < N / 4; i++) {
            uint32_t t[4];
            t[0] = (uint32_t(a[9 * i + 0]) | (uint32_t(a[9 * i + 1]) << 8) |
                    (uint32_t(a[9 * i + 2]) << 16)) &
                   0x3FFFF;
            t[1] = (uint32_t(a[9 * i + 2] >> 2) | (uint32_t(a[9 * i + 3]) << 6) |
                    (uint32_t(a[9 * i + 4]) << 14)) &
                   0x3FFFF;
            t[2] = (uint32_t(a[9 * i + 4] >> 4) | (uint32_t(a[9 * i + 5]) << 4) |
                    (uint32_t(a[9 * i + 6]) << 12)) &
                   0x3FFFF;
            t[3] = (uint32_t(a[9 * i + 6] >> 6) | (uint32_t(a[9 * i + 7]) << 2) |
                    (uint32_t(a[9 * i + 8]) << 10)) &
                   0x3FFFF;
            for (int j = 0; j < 4; j++) {
                r[4 * i + j] = gamma1 - int32_t(t[j]);
            }
        }
    } else {
        for (int i = 0; i < N / 2; i++) {
            uint32_t t0 = (uint32_t(a[5 * i + 0]) | (uint32_t(a[5 * i + 1]) << 8) |
                           (uint32_t(a[5 * i + 2]) << 16)) &
                          0xFFFFF;
            uint32_t t1 = (uint32_t(a[5 * i + 2] >> 4) | (uint32_t(a[5 * i + 3]) << 4) |
                           (uint32_t(a[5 * i + 4]) << 12)) &
                          0xFFFFF;
            r[2 * i + 0] = gamma1 - int32_t(t0);
            r[2 * i + 1] = gamma1 - int32_t(t1);
        }
    }
    return r;
}

DPoly poly_uniform_gamma1(ByteView rhoprime, uint16_t nonce, int32_t gamma1) {
    constexpr size_t kBlock = 136;
    size_t zbytes = gamma1 == (1 << 17) ? 576 : 640;
    size_t blocks = (zbytes + kBlock - 1) / kBlock;
    uint8_t buf[5 * kBlock];
    stream256(rhoprime, nonce).squeeze(buf, blocks * kBlock);
    return polyz_unpack(buf, gamma1);
}

void polyw1_pack(uint8_t* r, const DPoly& a, int32_t gamma2) {
    if (gamma2 == GAMMA2_88) {
        for (int i = 0; i < N / 4; i++) {
            r[3 * i + 0] = uint8_t(a[4 * i + 0] | (a[4 * i + 1] << 6));
            r[3 * i + 1] = uint8_t((a[4 * i + 1] >> 2) | (a[4 * i + 2] << 4));
            r[3 * i + 2] = uint8_t((a[4 * i + 2] >> 4) | (a[4 * i + 3] << 2));
        }
    } else {
        for (int i = 0; i < N / 2; i++) {
            r[i] = uint8_t(a[2 * i + 0] | (a[2 * i + 1] << 4));
        }
    }
}

// --- key/signature encodings ---

void check_gamma2(int32_t gamma2) {
    if (gamma2 != GAMMA2_88 && gamma2 != GAMMA2_32) {
        throw std::invalid_argument("gamma2 must be (q-1)/88 or (q-1)/32");
    }
}

void check_len(ByteView b, size_t expect, const char* what) {
    if (b.size() != expect) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expect) +
                                    " bytes, got " + std::to_string(b.size()));
    }
}

Bytes pack_pk(ByteView rho, const DPolyVec& t1) {
    Bytes pk(rho.begin(), rho.end());
    pk.resize(kSeedBytes + t1.size() * 320);
    for (size_t i = 0; i < t1.size(); i++) {
        polyt1_pack(pk.data() + kSeedBytes + i * 320, t1[i]);
    }
    return pk;
}

void unpack_pk(ByteView pk, uint8_t rho[kSeedBytes], DPolyVec& t1) {
    std::memcpy(rho, pk.data(), kSeedBytes);
    for (size_t i = 0; i < t1.size(); i++) {
        t1[i] = polyt1_unpack(pk.data() + kSeedBytes + i * 320);
    }
}

Bytes pack_sk(ByteView rho, ByteView tr, ByteView key, const DPolyVec& t0, const DPolyVec& s1,
              const DPolyVec& s2, const SigParams& p) {
    Bytes sk(p.sk_len);
    uint8_t* out = sk.data();
    std::memcpy(out, rho.data(), kSeedBytes);
    out += kSeedBytes;
    std::memcpy(out, key.data(), kSeedBytes);
    out += kSeedBytes;
    std::memcpy(out, tr.data(), kSeedBytes);
    out += kSeedBytes;
    size_t eta_bytes = polyeta_bytes(p);
    for (const auto& poly : s1) {
        polyeta_pack(out, poly, p.eta);
        out += eta_bytes;
    }
    for (const auto& poly : s2) {
        polyeta_pack(out, poly, p.eta);
        out += eta_bytes;
    }
    for (const auto& poly : t0) {
        polyt0_pack(out, poly);
        out += 416;
    }
    return sk;
}

struct UnpackedSk {
    uint8_t rho[kSeedBytes];
    uint8_t tr[kSeedBytes];
    uint8_t key[kSeedBytes];
    DPolyVec t0, s1, s2;
};

UnpackedSk unpack_sk(ByteView sk, const SigParams& p) {
    UnpackedSk u;
    const uint8_t* in = sk.data();
    std::memcpy(u.rho, in, kSeedBytes);
    in += kSeedBytes;
    std::memcpy(u.key, in, kSeedBytes);
    in += kSeedBytes;
    std::memcpy(u.tr, in, kSeedBytes);
    in += kSeedBytes;
    size_t eta_bytes = polyeta_bytes(p);
    u.s1.resize(p.l);
    for (auto& poly : u.s1) {
        poly = polyeta_unpack(in, p.eta);
        in += eta_bytes;
    }
    u.s2.resize(p.k);
    for (auto& poly : u.s2) {
        poly = polyeta_unpack(in, p.eta);
        in += eta_bytes;
    }
    u.t0.resize(p.k);
    for (auto& poly : u.t0) {
        poly = polyt0_unpack(in);
        in += 416;
    }
    return u;
}

Bytes pack_sig(const uint8_t c[kSeedBytes], const DPolyVec& z, const DPolyVec& h,
               const SigParams& p) {
    Bytes sig(p.sig_len, 0);
    uint8_t* out = sig.data();
    std::memcpy(out, c, kSeedBytes);
    out += kSeedBytes;
    size_t z_bytes = polyz_bytes(p);
    for (const auto& poly : z) {
        polyz_pack(out, poly, p.gamma1);
        out += z_bytes;
    }
    // Hint positions per polynomial, then a running count per polynomial.
    size_t idx = 0;
    for (int i = 0; i < p.k; i++) {
        for (int j = 0; j < N; j++) {
            if (h[i][j] != 0) {
                out[idx++] = uint8_t(j);
            }
        }
        out[p.omega + i] = uint8_t(idx);
    }
    return sig;
}

bool unpack_sig(ByteView sig, uint8_t c[kSeedBytes], DPolyVec& z, DPolyVec& h,
                const SigParams& p) {
    const uint8_t* in = sig.data();
    std::memcpy(c, in, kSeedBytes);
    in += kSeedBytes;
    size_t z_bytes = polyz_bytes(p);
    z.resize(p.l);
    for (auto& poly : z) {
        poly = polyz_unpack(in, p.gamma1);
        in += z_bytes;
    }
    // Strong unforgeability: positions strictly increasing per polynomial,
    // unused slots zero.
    h.assign(p.k, DPoly{});
    size_t idx = 0;
    for (int i = 0; i < p.k; i++) {
        uint8_t count = in[p.omega + i];
        if (count < idx || count > uint32_t(p.omega)) {
            return false;
        }
        for (size_t j = idx; j < count; j++) {
            if (j > idx && in[j] <= in[j - 1]) {
                return false;
            }
            h[i][in[j]] = 1;
        }
        idx = count;
    }
    for (size_t j = idx; j < size_t(p.omega); j++) {
        if (in[j] != 0) {
            return false;
        }
    }
    return true;
}

std::vector<DPoly> expand_matrix(const uint8_t rho[kSeedBytes], const SigParams& p) {
    std::vector<DPoly> mat(size_t(p.k) * p.l);
    for (int i = 0; i < p.k; i++) {
        for (int j = 0; j < p.l; j++) {
            mat[size_t(i) * p.l + j] =
                poly_uniform(ByteView(rho, kSeedBytes), uint16_t((i << 8) + j));
        }
    }
    return mat;
}

int32_t decompose_raw(int32_t* a0, int32_t a, int32_t gamma2) {
    int32_t a1 = (a + 127) >> 7;
    if (gamma2 == GAMMA2_88) {
        a1 = (a1 * 11275 + (1 << 23)) >> 24;
        a1 ^= ((43 - a1) >> 31) & a1;
    } else {
        a1 = (a1 * 1025 + (1 << 21)) >> 22;
        a1 &= 15;
    }
    *a0 = a - a1 * 2 * gamma2;
    *a0 -= (((Q - 1) / 2 - *a0) >> 31) & Q;
    return a1;
}

uint32_t poly_make_hint(DPoly& h, const DPoly& a0, const DPoly& a1, int32_t gamma2) {
    uint32_t s = 0;
    for (int i = 0; i < N; i++) {
        h[i] = make_hint(a0[i], a1[i], gamma2) ? 1 : 0;
        s += uint32_t(h[i]);
    }
    return s;
}

}  // namespace

const SigParams& params_for_mode(int mode) {
    for (const auto& p : kParamSets) {
        if (p.mode == mode) {
            return p;
        }
    }
    throw std::invalid_argument("no Dilithium parameter set for mode " + std::to_string(mode));
}

DPoly d_ntt(const DPoly& p) {
    DPoly r = p;
    ntt_ip(r);
    for (auto& c : r) {
        c = freeze(c);
    }
    return r;
}

DPoly d_inv_ntt(const DPoly& p) {
    DPoly r = p;
    invntt_tomont_ip(r);
    // Drop the Montgomery factor the reference leaves on inverse-transform
    // output so the composition with d_ntt is the identity.
    for (auto& c : r) {
        c = freeze(montgomery_reduce(int64_t(c)));
    }
    return r;
}

DPoly pointwise(const DPoly& a, const DPoly& b) {
    DPoly r;
    for (int i = 0; i < N; i++) {
        int32_t m = montgomery_reduce(int64_t(a[i]) * b[i]);
        r[i] = freeze(montgomery_reduce(int64_t(m) * MONT_R2));
    }
    return r;
}

std::pair<int32_t, int32_t> power2round(int32_t r) {
    int32_t r1 = (r + (1 << (D - 1)) - 1) >> D;
    return {r1, r - (r1 << D)};
}

std::pair<int32_t, int32_t> decompose(int32_t r, int32_t gamma2) {
    check_gamma2(gamma2);
    int32_t r0;
    int32_t r1 = decompose_raw(&r0, r, gamma2);
    return {r1, r0};
}

bool make_hint(int32_t a0, int32_t a1, int32_t gamma2) {
    check_gamma2(gamma2);
    return a0 > gamma2 || a0 < -gamma2 || (a0 == -gamma2 && a1 != 0);
}

int32_t use_hint(int32_t r, bool hint, int32_t gamma2) {
    check_gamma2(gamma2);
    int32_t a0;
    int32_t a1 = decompose_raw(&a0, r, gamma2);
    if (!hint) {
        return a1;
    }
    if (gamma2 == GAMMA2_88) {
        if (a0 > 0) {
            return a1 == 43 ? 0 : a1 + 1;
        }
        return a1 == 0 ? 43 : a1 - 1;
    }
    return a0 > 0 ? (a1 + 1) & 15 : (a1 - 1) & 15;
}

DPoly sample_in_ball(ByteView seed, int tau) {
    check_len(seed, kSeedBytes, "sample_in_ball seed");
    KeccakSponge state(136, 0x1f);
    state.absorb(seed);
    uint8_t buf[136];
    state.squeeze(buf, sizeof(buf));
    uint64_t signs = 0;
    for (int i = 0; i < 8; i++) {
        signs |= uint64_t(buf[i]) << (8 * i);
    }
    size_t pos = 8;
    DPoly c{};
    for (int i = N - tau; i < N; i++) {
        uint8_t b;
        do {
            if (pos >= sizeof(buf)) {
                state.squeeze(buf, sizeof(buf));
                pos = 0;
            }
            b = buf[pos++];
        } while (b > i);
        c[i] = c[b];
        c[b] = 1 - 2 * int32_t(signs & 1);
        signs >>= 1;
    }
    return c;
}

std::pair<Bytes, Bytes> keygen(ByteView seed, const SigParams& p) {
    check_len(seed, kSeedBytes, "keygen seed");
    Bytes seedbuf = shake256(seed, 2 * kSeedBytes + kCrhBytes);
    ByteView rho(seedbuf.data(), kSeedBytes);
    ByteView rhoprime(seedbuf.data() + kSeedBytes, kCrhBytes);
    ByteView key(seedbuf.data() + kSeedBytes + kCrhBytes, kSeedBytes);

    std::vector<DPoly> mat = expand_matrix(rho.data(), p);
    DPolyVec s1(p.l), s2(p.k);
    for (int i = 0; i < p.l; i++) {
        s1[i] = poly_uniform_eta(rhoprime, uint16_t(i), p.eta);
    }
    for (int i = 0; i < p.k; i++) {
        s2[i] = poly_uniform_eta(rhoprime, uint16_t(p.l + i), p.eta);
    }

    DPolyVec s1hat = s1;
    for (auto& poly : s1hat) {
        ntt_ip(poly);
    }
    DPolyVec t1(p.k), t0(p.k);
    for (int i = 0; i < p.k; i++) {
        DPoly t = pointwise_acc_mont(&mat[size_t(i) * p.l], s1hat);
        reduce_ip(t);
        invntt_tomont_ip(t);
        add_ip(t, s2[i]);
        caddq_ip(t);
        for (int j = 0; j < N; j++) {
            auto [hi, lo] = power2round(t[j]);
            t1[i][j] = hi;
            t0[i][j] = lo;
        }
    }

    Bytes pk = pack_pk(rho, t1);
    Bytes tr = shake256(pk, kSeedBytes);
    Bytes sk = pack_sk(rho, tr, key, t0, s1, s2, p);
    return {std::move(pk), std::move(sk)};
}

SignResult sign(ByteView sk, ByteView msg, const SigParams& p) {
    check_len(sk, p.sk_len, "sign sk");
    UnpackedSk u = unpack_sk(sk, p);

    // mu = CRH(tr || msg), rhoprime = CRH(key || mu): deterministic signing.
    KeccakSponge h(136, 0x1f);
    h.absorb(ByteView(u.tr, kSeedBytes));
    h.absorb(msg);
    Bytes mu = h.squeeze(kCrhBytes);
    Bytes key_mu(u.key, u.key + kSeedBytes);
    key_mu.insert(key_mu.end(), mu.begin(), mu.end());
    Bytes rhoprime = shake256(key_mu, kCrhBytes);

    std::vector<DPoly> mat = expand_matrix(u.rho, p);
    for (auto& poly : u.s1) {
        ntt_ip(poly);
    }
    for (auto& poly : u.s2) {
        ntt_ip(poly);
    }
    for (auto& poly : u.t0) {
        ntt_ip(poly);
    }

    size_t w1_bytes = polyw1_bytes(p);
    Bytes w1packed(size_t(p.k) * w1_bytes);
    uint8_t c_tilde[kSeedBytes];
    DPolyVec y(p.l), z(p.l), w1(p.k), w0(p.k), hvec(p.k);
    uint16_t kappa = 0;
    uint32_t iterations = 0;

    while (true) {
        iterations++;
        for (int i = 0; i < p.l; i++) {
            y[i] = poly_uniform_gamma1(rhoprime, uint16_t(p.l * kappa + i), p.gamma1);
        }
        kappa++;

        z = y;
        for (auto& poly : z) {
            ntt_ip(poly);
        }
        for (int i = 0; i < p.k; i++) {
            w1[i] = pointwise_acc_mont(&mat[size_t(i) * p.l], z);
            reduce_ip(w1[i]);
            invntt_tomont_ip(w1[i]);
            caddq_ip(w1[i]);
            for (int j = 0; j < N; j++) {
                w1[i][j] = decompose_raw(&w0[i][j], w1[i][j], p.gamma2);
            }
            polyw1_pack(w1packed.data() + size_t(i) * w1_bytes, w1[i], p.gamma2);
        }

        KeccakSponge ch(136, 0x1f);
        ch.absorb(mu);
        ch.absorb(w1packed);
        ch.squeeze(c_tilde, kSeedBytes);
        DPoly cp = sample_in_ball(ByteView(c_tilde, kSeedBytes), p.tau);
        ntt_ip(cp);

        for (int i = 0; i < p.l; i++) {
            z[i] = pointwise_mont(cp, u.s1[i]);
            invntt_tomont_ip(z[i]);
            add_ip(z[i], y[i]);
            reduce_ip(z[i]);
        }
        if (vec_chknorm(z, p.gamma1 - p.beta)) {
            continue;
        }

        // High bits of w must survive subtracting c*s2, and the low bits must
        // stay clear of the secret-revealing band.
        bool reject = false;
        for (int i = 0; i < p.k; i++) {
            DPoly cs2 = pointwise_mont(cp, u.s2[i]);
            invntt_tomont_ip(cs2);
            sub_ip(w0[i], cs2);
            reduce_ip(w0[i]);
            if (chknorm(w0[i], p.gamma2 - p.beta)) {
                reject = true;
                break;
            }
        }
        if (reject) {
            continue;
        }

        uint32_t hint_count = 0;
        for (int i = 0; i < p.k; i++) {
            DPoly ct0 = pointwise_mont(cp, u.t0[i]);
            invntt_tomont_ip(ct0);
            reduce_ip(ct0);
            if (chknorm(ct0, p.gamma2)) {
                reject = true;
                break;
            }
            add_ip(w0[i], ct0);
            hint_count += poly_make_hint(hvec[i], w0[i], w1[i], p.gamma2);
        }
        if (reject || hint_count > uint32_t(p.omega)) {
            continue;
        }

        Bytes sig = pack_sig(c_tilde, z, hvec, p);
        SignResult res;
        res.sm = std::move(sig);
        res.sm.insert(res.sm.end(), msg.begin(), msg.end());
        res.iterations = iterations;
        return res;
    }
}

std::optional<Bytes> verify(ByteView pk, ByteView sm, const SigParams& p) {
    check_len(pk, p.pk_len, "verify pk");
    if (sm.size() < p.sig_len) {
        return std::nullopt;
    }
    ByteView sig = sm.first(p.sig_len);
    ByteView msg = sm.subspan(p.sig_len);

    uint8_t rho[kSeedBytes];
    DPolyVec t1(p.k);
    unpack_pk(pk, rho, t1);
    uint8_t c[kSeedBytes];
    DPolyVec z, hvec;
    if (!unpack_sig(sig, c, z, hvec, p)) {
        return std::nullopt;
    }
    if (vec_chknorm(z, p.gamma1 - p.beta)) {
        return std::nullopt;
    }

    Bytes mu0 = shake256(pk, kSeedBytes);
    KeccakSponge h(136, 0x1f);
    h.absorb(mu0);
    h.absorb(msg);
    Bytes mu = h.squeeze(kCrhBytes);

    DPoly cp = sample_in_ball(ByteView(c, kSeedBytes), p.tau);
    std::vector<DPoly> mat = expand_matrix(rho, p);
    for (auto& poly : z) {
        ntt_ip(poly);
    }
    ntt_ip(cp);

    size_t w1_bytes = polyw1_bytes(p);
    Bytes w1packed(size_t(p.k) * w1_bytes);
    for (int i = 0; i < p.k; i++) {
        DPoly w = pointwise_acc_mont(&mat[size_t(i) * p.l], z);
        DPoly t = t1[i];
        for (auto& coeff : t) {
            coeff <<= D;
        }
        ntt_ip(t);
        t = pointwise_mont(cp, t);
        sub_ip(w, t);
        reduce_ip(w);
        invntt_tomont_ip(w);
        caddq_ip(w);
        for (int j = 0; j < N; j++) {
            int32_t a0;
            int32_t a1 = decompose_raw(&a0, w[j], p.gamma2);
            if (hvec[i][j]) {
                if (p.gamma2 == GAMMA2_88) {
                    a1 = a0 > 0 ? (a1 == 43 ? 0 : a1 + 1) : (a1 == 0 ? 43 : a1 - 1);
                } else {
                    a1 = a0 > 0 ? (a1 + 1) & 15 : (a1 - 1) & 15;
                }
            }
            w[j] = a1;
        }
        polyw1_pack(w1packed.data() + size_t(i) * w1_bytes, w, p.gamma2);
    }

    KeccakSponge ch(136, 0x1f);
    ch.absorb(mu);
    ch.absorb(w1packed);
    Bytes c2 = ch.squeeze(kSeedBytes);
    if (std::memcmp(c, c2.data(), kSeedBytes) != 0) {
        return std::nullopt;
    }
    return Bytes(msg.begin(), msg.end());
}

}  // namespace pqeval::dilithium
