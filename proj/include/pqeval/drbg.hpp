#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pqeval/aes.hpp"
#include "pqeval/bytes.hpp"

namespace pqeval {

// AES-256 CTR DRBG with the NIST KAT-harness semantics: no derivation
// function, no prediction resistance, null personalization string,
// security strength fixed at 256.
class CtrDrbg {
  public:
    // entropy must be exactly 48 bytes.
    explicit CtrDrbg(ByteView entropy);

    // Fills out; every call updates the state afterwards, including n = 0.
    void generate(uint8_t* out, size_t n);
    Bytes generate(size_t n);

    const std::array<uint8_t, 32>& key() const { return key_; }
    const std::array<uint8_t, 16>& v() const { return v_; }
    uint64_t reseed_counter() const { return reseed_counter_; }

  private:
    void update(const uint8_t* provided48);
    void increment_v();

    std::array<uint8_t, 32> key_{};
    std::array<uint8_t, 16> v_{};
    uint64_t reseed_counter_ = 0;
};

// seed_i = i-th consecutive 48-byte generate() from one init(master_entropy).
std::vector<std::array<uint8_t, 48>> kat_seed_schedule(ByteView master_entropy, size_t n);

}  // namespace pqeval
