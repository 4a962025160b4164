#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "pqeval/bytes.hpp"

namespace pqeval {

// FIPS 202 permutation state: 25 lanes, lane (x, y) at index x + 5*y,
// little-endian byte loading.
using KeccakLanes = std::array<uint64_t, 25>;

void keccak_f1600(KeccakLanes& lanes);

// Sponge with incremental absorb/squeeze. rate_bytes must be one of
// {168, 136, 104, 72}; suffix is the domain-separation byte (0x06 for SHA3,
// 0x1f for SHAKE).
class KeccakSponge {
  public:
    KeccakSponge(size_t rate_bytes, uint8_t suffix);

    void absorb(ByteView data);
    // Pads and switches to the squeeze phase. Called implicitly by squeeze().
    void finalize();
    void squeeze(uint8_t* out, size_t outlen);
    Bytes squeeze(size_t outlen);

    size_t rate() const { return rate_; }

  private:
    KeccakLanes lanes_{};
    size_t rate_;
    uint8_t suffix_;
    size_t pos_ = 0;
    bool squeezing_ = false;
};

Bytes sha3_256(ByteView msg);
Bytes sha3_512(ByteView msg);
Bytes shake128(ByteView msg, size_t outlen);
Bytes shake256(ByteView msg, size_t outlen);

}  // namespace pqeval
