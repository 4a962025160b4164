#pragma once

#include <array>
#include <cstdint>

#include "pqeval/bytes.hpp"

namespace pqeval {

// FIPS 197 AES-256, single-block ECB encryption only (the DRBG primitive).
class Aes256 {
  public:
    explicit Aes256(ByteView key);  // key must be 32 bytes

    std::array<uint8_t, 16> encrypt_block(ByteView block) const;  // block must be 16 bytes

  private:
    std::array<uint32_t, 60> round_keys_;
};

// Convenience wrapper with length checks; throws std::invalid_argument.
Bytes aes256_ecb_block(ByteView key, ByteView block);

}  // namespace pqeval
