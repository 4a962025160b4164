#include "pqeval/nist_api.hpp"

#include <stdexcept>

namespace pqeval {

namespace {

std::vector<SchemeEntry> make_registry() {
    std::vector<SchemeEntry> r;
    for (int level : {1, 3, 5}) {
        const auto& p = kyber::params_for_level(level);
        r.push_back({Family::kyber, level, p.name, true, true, &p, nullptr});
    }
    for (int mode : {2, 3, 5}) {
        const auto& p = dilithium::params_for_mode(mode);
        r.push_back({Family::dilithium, mode, p.name, false, false, nullptr, &p});
    }
    return r;
}

void require_kem(const SchemeEntry& e, const char* what) {
    if (!e.is_kem) {
        throw std::invalid_argument(std::string(what) + ": entry is not a KEM");
    }
}

void require_sig(const SchemeEntry& e, const char* what) {
    if (e.is_kem) {
        throw std::invalid_argument(std::string(what) + ": entry is not a signature scheme");
    }
}

}  // namespace

const char* family_name(Family f) { return f == Family::kyber ? "kyber" : "dilithium"; }

const char* operation_name(Operation op) {
    switch (op) {
        case Operation::encapsulate:
            return "encapsulate";
        case Operation::decapsulate:
            return "decapsulate";
        case Operation::sign:
            return "sign";
        case Operation::verify:
            return "verify";
        case Operation::keypair:
            return "keypair";
    }
    return "?";
}

std::optional<Family> family_from_string(std::string_view s) {
    if (s == "kyber") {
        return Family::kyber;
    }
    if (s == "dilithium") {
        return Family::dilithium;
    }
    return std::nullopt;
}

std::optional<Operation> operation_from_string(std::string_view s) {
    for (Operation op : {Operation::encapsulate, Operation::decapsulate, Operation::sign,
                         Operation::verify, Operation::keypair}) {
        if (s == operation_name(op)) {
            return op;
        }
    }
    return std::nullopt;
}

bool valid_combo(Family family, int nist_level) {
    return registry_lookup(family, nist_level) != nullptr;
}

const std::vector<SchemeEntry>& registry_all() {
    static const std::vector<SchemeEntry> registry = make_registry();
    return registry;
}

const SchemeEntry* registry_lookup(Family family, int nist_level) {
    for (const auto& e : registry_all()) {
        if (e.family == family && e.nist_level == nist_level) {
            return &e;
        }
    }
    return nullptr;
}

std::pair<Bytes, Bytes> kem_apply(const SchemeEntry& e, ByteView pk, ByteView coins) {
    require_kem(e, "kem_apply");
    if (e.coins_extension && coins.empty()) {
        throw std::invalid_argument("kem_apply: entry requires a coins buffer");
    }
    return kyber::kem_enc_derand(pk, coins, *e.kem);
}

Bytes kem_verify(const SchemeEntry& e, ByteView sk, ByteView ct) {
    require_kem(e, "kem_verify");
    return kyber::kem_dec(sk, ct, *e.kem);
}

Bytes sig_apply(const SchemeEntry& e, ByteView sk, ByteView msg) {
    require_sig(e, "sig_apply");
    return dilithium::sign(sk, msg, *e.sig).sm;
}

std::optional<Bytes> sig_verify(const SchemeEntry& e, ByteView pk, ByteView sm) {
    require_sig(e, "sig_verify");
    return dilithium::verify(pk, sm, *e.sig);
}

std::pair<Bytes, Bytes> keypair_from_drbg(const SchemeEntry& e, CtrDrbg& rng) {
    if (e.is_kem) {
        Bytes coins = rng.generate(32);
        Bytes z = rng.generate(32);
        coins.insert(coins.end(), z.begin(), z.end());
        return kyber::kem_keygen(coins, *e.kem);
    }
    Bytes seed = rng.generate(32);
    return dilithium::keygen(seed, *e.sig);
}

}  // namespace pqeval
