#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pqeval/bytes.hpp"
#include "pqeval/device.hpp"
#include "pqeval/nist_api.hpp"

namespace pqeval {

struct KatKemCase {
    int count = 0;
    Bytes seed;  // 48 bytes
    Bytes pk;
    Bytes sk;
    Bytes ct;
    Bytes ss;
};

struct KatSignCase {
    int count = 0;
    Bytes seed;  // 48 bytes
    std::size_t mlen = 0;
    Bytes msg;
    Bytes pk;
    Bytes sk;
    std::size_t smlen = 0;
    Bytes sm;
};

struct KatFile {
    std::string header;  // algorithm name from the "# <name>" line
    bool is_kem = true;
    std::vector<KatKemCase> kem_cases;
    std::vector<KatSignCase> sign_cases;

    std::size_t case_count() const { return is_kem ? kem_cases.size() : sign_cases.size(); }
};

struct KatParseError : std::runtime_error {
    int line;  // 1-based
    KatParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Tolerant of CRLF/LF and extra blank lines. Field lines are `name = HEX` or
// `name = int`; case counts must be consecutive from 0.
KatFile parse_rsp(std::string_view text);

// NIST response-file layout: "# <name>", blank line, then the fields of each
// case in fixed order with uppercase hex, one blank line after every case.
std::string write_rsp(const KatFile& file);

// Reproduces the NIST generator: the master DRBG seeded with master_entropy
// emits per-case 48-byte seeds (for signatures interleaved with the 33*(i+1)
// byte messages); each case re-seeds a fresh DRBG and draws coins in the
// reference call order.
KatFile generate_kat(const SchemeEntry& entry, int n, ByteView master_entropy);

struct KatCaseResult {
    int count = 0;
    bool pass = true;
    std::string first_mismatch;  // field name, or "fault: <reason>"
};

struct KatReport {
    std::vector<KatCaseResult> cases;
    int passed = 0;

    bool all_pass() const { return passed == static_cast<int>(cases.size()); }
};

// apply -> compare (ct, ss) or sm; verify -> compare ss or msg. KEM coins are
// expanded from the case seed, never read back from the stored outputs.
// Backend faults become case failures, not aborts.
KatReport run_kat(Backend& backend, const SchemeEntry& entry, const KatFile& file);

}  // namespace pqeval
