#include "pqeval/drbg.hpp"

#include <cstring>
#include <stdexcept>

namespace pqeval {

CtrDrbg::CtrDrbg(ByteView entropy) {
    if (entropy.size() != 48) throw std::invalid_argument("DRBG entropy must be 48 bytes");
    update(entropy.data());
    reseed_counter_ = 1;
}

void CtrDrbg::increment_v() {
    for (int j = 15; j >= 0; j--) {
        if (v_[j] == 0xff) {
            v_[j] = 0x00;
        } else {
            v_[j]++;
            break;
        }
    }
}

void CtrDrbg::update(const uint8_t* provided48) {
    Aes256 aes(key_);
    uint8_t temp[48];
    for (int i = 0; i < 3; i++) {
        increment_v();
        auto block = aes.encrypt_block(v_);
        std::memcpy(temp + 16 * i, block.data(), 16);
    }
    if (provided48 != nullptr)
        for (int i = 0; i < 48; i++) temp[i] ^= provided48[i];
    std::memcpy(key_.data(), temp, 32);
    std::memcpy(v_.data(), temp + 32, 16);
}

void CtrDrbg::generate(uint8_t* out, size_t n) {
    Aes256 aes(key_);
    while (n > 0) {
        increment_v();
        auto block = aes.encrypt_block(v_);
        size_t take = n > 15 ? 16 : n;
        std::memcpy(out, block.data(), take);
        out += take;
        n -= take;
    }
    update(nullptr);
    reseed_counter_++;
}

Bytes CtrDrbg::generate(size_t n) {
    Bytes out(n);
    generate(out.data(), n);
    return out;
}

std::vector<std::array<uint8_t, 48>> kat_seed_schedule(ByteView master_entropy, size_t n) {
    if (n < 1) throw std::invalid_argument("seed schedule needs n >= 1");
    CtrDrbg drbg(master_entropy);
    std::vector<std::array<uint8_t, 48>> seeds(n);
    for (auto& seed : seeds) drbg.generate(seed.data(), 48);
    return seeds;
}

}  // namespace pqeval
