#include "pqeval/keccak.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace pqeval {

namespace {

// rho rotation offsets, indexed [x][y].
constexpr int kRho[5][5] = {
    {0, 36, 3, 41, 18},
    {1, 44, 10, 45, 2},
    {62, 6, 43, 15, 61},
    {28, 55, 25, 21, 56},
    {27, 20, 39, 8, 14},
};

// Round constants from the degree-8 LFSR of FIPS 202 §3.2.5.
constexpr std::array<uint64_t, 24> round_constants() {
    std::array<uint64_t, 24> rc{};
    unsigned lfsr = 1;
    for (int round = 0; round < 24; round++) {
        uint64_t v = 0;
        for (int j = 0; j < 7; j++) {
            if (lfsr & 1) v ^= uint64_t{1} << ((1u << j) - 1);
            lfsr <<= 1;
            if (lfsr & 0x100) lfsr ^= 0x171;
        }
        rc[round] = v;
    }
    return rc;
}

constexpr auto kRoundConstants = round_constants();

}  // namespace

void keccak_f1600(KeccakLanes& a) {
    for (uint64_t rc : kRoundConstants) {
        uint64_t c[5], d[5];
        for (int x = 0; x < 5; x++)
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        for (int x = 0; x < 5; x++)
            d[x] = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
        for (int x = 0; x < 5; x++)
            for (int y = 0; y < 5; y++) a[x + 5 * y] ^= d[x];

        KeccakLanes b;
        for (int x = 0; x < 5; x++)
            for (int y = 0; y < 5; y++)
                b[y + 5 * ((2 * x + 3 * y) % 5)] = std::rotl(a[x + 5 * y], kRho[x][y]);
        for (int x = 0; x < 5; x++)
            for (int y = 0; y < 5; y++)
                a[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);

        a[0] ^= rc;
    }
}

KeccakSponge::KeccakSponge(size_t rate_bytes, uint8_t suffix)
    : rate_(rate_bytes), suffix_(suffix) {
    if (rate_ != 168 && rate_ != 136 && rate_ != 104 && rate_ != 72)
        throw std::invalid_argument("unsupported sponge rate");
}

void KeccakSponge::absorb(ByteView data) {
    if (squeezing_) throw std::logic_error("absorb after squeeze");
    for (uint8_t byte : data) {
        lanes_[pos_ / 8] ^= uint64_t{byte} << (8 * (pos_ % 8));
        if (++pos_ == rate_) {
            keccak_f1600(lanes_);
            pos_ = 0;
        }
    }
}

void KeccakSponge::finalize() {
    if (squeezing_) return;
    lanes_[pos_ / 8] ^= uint64_t{suffix_} << (8 * (pos_ % 8));
    lanes_[(rate_ - 1) / 8] ^= uint64_t{0x80} << (8 * ((rate_ - 1) % 8));
    keccak_f1600(lanes_);
    pos_ = 0;
    squeezing_ = true;
}

void KeccakSponge::squeeze(uint8_t* out, size_t outlen) {
    finalize();
    while (outlen > 0) {
        if (pos_ == rate_) {
            keccak_f1600(lanes_);
            pos_ = 0;
        }
        size_t n = std::min(outlen, rate_ - pos_);
        for (size_t i = 0; i < n; i++, pos_++)
            *out++ = uint8_t(lanes_[pos_ / 8] >> (8 * (pos_ % 8)));
        outlen -= n;
    }
}

Bytes KeccakSponge::squeeze(size_t outlen) {
    Bytes out(outlen);
    squeeze(out.data(), outlen);
    return out;
}

namespace {

Bytes hash_oneshot(size_t rate, uint8_t suffix, ByteView msg, size_t outlen) {
    KeccakSponge sponge(rate, suffix);
    sponge.absorb(msg);
    return sponge.squeeze(outlen);
}

}  // namespace

Bytes sha3_256(ByteView msg) { return hash_oneshot(136, 0x06, msg, 32); }
Bytes sha3_512(ByteView msg) { return hash_oneshot(72, 0x06, msg, 64); }
Bytes shake128(ByteView msg, size_t outlen) { return hash_oneshot(168, 0x1f, msg, outlen); }
Bytes shake256(ByteView msg, size_t outlen) { return hash_oneshot(136, 0x1f, msg, outlen); }

}  // namespace pqeval
