#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "pqeval/bytes.hpp"
#include "pqeval/dilithium.hpp"
#include "pqeval/drbg.hpp"
#include "pqeval/kyber.hpp"

namespace pqeval {

enum class Family { kyber, dilithium };
enum class Operation { encapsulate, decapsulate, sign, verify, keypair };

const char* family_name(Family f);
const char* operation_name(Operation op);
std::optional<Family> family_from_string(std::string_view s);
std::optional<Operation> operation_from_string(std::string_view s);

// Valid combos: kyber x {1,3,5}, dilithium x {2,3,5}.
bool valid_combo(Family family, int nist_level);

struct AlgorithmId {
    Family family;
    int nist_level;
    Operation operation;
};

// One registered scheme per (family, level); exactly one of kem/sig is set.
struct SchemeEntry {
    Family family;
    int nist_level;
    const char* name;
    bool is_kem;
    bool coins_extension;  // apply takes a caller-supplied randomness buffer
    const kyber::KemParams* kem;
    const dilithium::SigParams* sig;

    size_t pk_len() const { return is_kem ? kem->pk_len : sig->pk_len; }
    size_t sk_len() const { return is_kem ? kem->sk_len : sig->sk_len; }
};

// nullptr when the combo is not registered.
const SchemeEntry* registry_lookup(Family family, int nist_level);
const std::vector<SchemeEntry>& registry_all();

// Generic apply/verify pairs dispatching to the engines.
std::pair<Bytes, Bytes> kem_apply(const SchemeEntry& e, ByteView pk, ByteView coins);  // (ct, ss)
Bytes kem_verify(const SchemeEntry& e, ByteView sk, ByteView ct);                      // ss
Bytes sig_apply(const SchemeEntry& e, ByteView sk, ByteView msg);                      // sm
std::optional<Bytes> sig_verify(const SchemeEntry& e, ByteView pk, ByteView sm);       // msg

// Software-only keypair, drawing randomness from the DRBG in the call order of
// the reference implementations (KEM: CPA seed then z, two draws; SIG: one).
std::pair<Bytes, Bytes> keypair_from_drbg(const SchemeEntry& e, CtrDrbg& rng);  // (pk, sk)

}  // namespace pqeval
