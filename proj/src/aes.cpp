#include "pqeval/aes.hpp"

#include <stdexcept>

namespace pqeval {

namespace {

// GF(2^8) multiply, reduction polynomial x^8 + x^4 + x^3 + x + 1.
constexpr uint8_t gf_mul(uint8_t a, uint8_t b) {
    uint8_t p = 0;
    for (int i = 0; i < 8; i++) {
        if (b & 1) p ^= a;
        bool hi = a & 0x80;
        a <<= 1;
        if (hi) a ^= 0x1b;
        b >>= 1;
    }
    return p;
}

// S-box built from the multiplicative inverse plus the affine transform,
// rather than a transcribed table.
constexpr std::array<uint8_t, 256> make_sbox() {
    std::array<uint8_t, 256> inv{};
    for (int a = 1; a < 256; a++) {
        for (int b = 1; b < 256; b++) {
            if (gf_mul(uint8_t(a), uint8_t(b)) == 1) {
                inv[a] = uint8_t(b);
                break;
            }
        }
    }
    std::array<uint8_t, 256> sbox{};
    for (int i = 0; i < 256; i++) {
        uint8_t x = inv[i];
        uint8_t y = x;
        for (int r = 0; r < 4; r++) {
            y = uint8_t(y << 1 | y >> 7);
            x ^= y;
        }
        sbox[i] = x ^ 0x63;
    }
    return sbox;
}

constexpr auto kSbox = make_sbox();

uint32_t sub_word(uint32_t w) {
    return uint32_t(kSbox[w >> 24]) << 24 | uint32_t(kSbox[(w >> 16) & 0xff]) << 16 |
           uint32_t(kSbox[(w >> 8) & 0xff]) << 8 | kSbox[w & 0xff];
}

uint32_t rot_word(uint32_t w) { return w << 8 | w >> 24; }

}  // namespace

Aes256::Aes256(ByteView key) {
    if (key.size() != 32) throw std::invalid_argument("AES-256 key must be 32 bytes");
    for (int i = 0; i < 8; i++)
        round_keys_[i] = uint32_t(key[4 * i]) << 24 | uint32_t(key[4 * i + 1]) << 16 |
                         uint32_t(key[4 * i + 2]) << 8 | key[4 * i + 3];
    uint8_t rcon = 1;
    for (int i = 8; i < 60; i++) {
        uint32_t t = round_keys_[i - 1];
        if (i % 8 == 0) {
            t = sub_word(rot_word(t)) ^ uint32_t(rcon) << 24;
            rcon = gf_mul(rcon, 2);
        } else if (i % 8 == 4) {
            t = sub_word(t);
        }
        round_keys_[i] = round_keys_[i - 8] ^ t;
    }
}

std::array<uint8_t, 16> Aes256::encrypt_block(ByteView block) const {
    if (block.size() != 16) throw std::invalid_argument("AES block must be 16 bytes");
    uint8_t s[16];
    for (int i = 0; i < 16; i++) s[i] = block[i];

    auto add_round_key = [&](int round) {
        for (int c = 0; c < 4; c++) {
            uint32_t w = round_keys_[4 * round + c];
            s[4 * c + 0] ^= uint8_t(w >> 24);
            s[4 * c + 1] ^= uint8_t(w >> 16);
            s[4 * c + 2] ^= uint8_t(w >> 8);
            s[4 * c + 3] ^= uint8_t(w);
        }
    };
    auto sub_shift = [&] {
        for (int i = 0; i < 16; i++) s[i] = kSbox[s[i]];
        // ShiftRows on column-major state: row r rotates left by r.
        uint8_t t;
        t = s[1]; s[1] = s[5]; s[5] = s[9]; s[9] = s[13]; s[13] = t;
        t = s[2]; s[2] = s[10]; s[10] = t; t = s[6]; s[6] = s[14]; s[14] = t;
        t = s[15]; s[15] = s[11]; s[11] = s[7]; s[7] = s[3]; s[3] = t;
    };
    auto mix_columns = [&] {
        for (int c = 0; c < 4; c++) {
            uint8_t* col = s + 4 * c;
            uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
            col[0] = gf_mul(a0, 2) ^ gf_mul(a1, 3) ^ a2 ^ a3;
            col[1] = a0 ^ gf_mul(a1, 2) ^ gf_mul(a2, 3) ^ a3;
            col[2] = a0 ^ a1 ^ gf_mul(a2, 2) ^ gf_mul(a3, 3);
            col[3] = gf_mul(a0, 3) ^ a1 ^ a2 ^ gf_mul(a3, 2);
        }
    };

    add_round_key(0);
    for (int round = 1; round < 14; round++) {
        sub_shift();
        mix_columns();
        add_round_key(round);
    }
    sub_shift();
    add_round_key(14);

    std::array<uint8_t, 16> out;
    for (int i = 0; i < 16; i++) out[i] = s[i];
    return out;
}

Bytes aes256_ecb_block(ByteView key, ByteView block) {
    Aes256 aes(key);
    auto out = aes.encrypt_block(block);
    return Bytes(out.begin(), out.end());
}

}  // namespace pqeval
