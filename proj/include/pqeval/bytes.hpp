#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pqeval {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

// Uppercase hex, NIST .rsp convention.
std::string to_hex(ByteView data);

// Case-insensitive; throws std::invalid_argument on odd length or non-hex digits.
Bytes from_hex(std::string_view hex);

inline Bytes concat(ByteView a, ByteView b) {
    Bytes out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace pqeval
