// Acceptance gate. Runs every release criterion and prints one verdict line
// per criterion, with indented notes where a number deserves context.
//
//   acceptance       runs all criteria
//   acceptance N     runs criterion N only (1..8)
//
// Exit code is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pqeval/aes.hpp"
#include "pqeval/bench.hpp"
#include "pqeval/bytes.hpp"
#include "pqeval/datasets.hpp"
#include "pqeval/device.hpp"
#include "pqeval/dilithium.hpp"
#include "pqeval/drbg.hpp"
#include "pqeval/kat.hpp"
#include "pqeval/keccak.hpp"
#include "pqeval/kyber.hpp"
#include "pqeval/nist_api.hpp"
#include "pqeval/report.hpp"

using namespace pqeval;

namespace {

using Notes = std::vector<std::string>;

std::string source_dir() {
    const char* dir = std::getenv("PQEVAL_SOURCE_DIR");
    return dir ? dir : "";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Bytes counting_entropy() {
    Bytes e(48);
    for (size_t i = 0; i < e.size(); ++i) e[i] = static_cast<uint8_t>(i);
    return e;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string kat_filename(const SchemeEntry& e) {
    std::ostringstream name;
    name << (e.is_kem ? "PQCkemKAT_" : "PQCsignKAT_") << e.sk_len() << ".rsp";
    return name.str();
}

std::string fmt(double v, int prec = 10) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

// --- criterion 1: software KAT self-consistency -----------------------------

bool criterion1(std::string& summary, Notes& notes) {
    auto backend = SoftwareBackend::with_all_pes();
    int total = 0;
    int passed = 0;
    for (const auto& entry : registry_all()) {
        auto file = generate_kat(entry, 100, counting_entropy());
        auto report = run_kat(backend, entry, file);
        total += static_cast<int>(file.case_count());
        passed += report.passed;
        if (!report.all_pass()) {
            for (const auto& c : report.cases) {
                if (!c.pass) {
                    notes.push_back(std::string(entry.name) + " case " +
                                    std::to_string(c.count) + ": " + c.first_mismatch);
                    break;
                }
            }
        }
    }
    std::ostringstream s;
    s << "software backend reproduces " << passed << "/" << total
      << " generated KAT cases across all six schemes";
    summary = s.str();
    return passed == total && total == 600;
}

// --- criterion 2: byte-identity with the published KAT files ----------------

bool criterion2(std::string& summary, Notes& notes) {
    std::string dir = source_dir();
    if (dir.empty()) {
        summary = "PQEVAL_SOURCE_DIR not set; cannot locate pinned KAT digests";
        return false;
    }

    std::map<std::string, std::string> pins;
    {
        std::istringstream in(read_file(dir + "/tests/data/kat_pins.txt"));
        std::string name, digest;
        while (in >> name >> digest) pins[name] = lower(digest);
    }

    int ok = 0;
    int checked = 0;
    for (const auto& entry : registry_all()) {
        ++checked;
        auto file = generate_kat(entry, 100, counting_entropy());
        std::string text = write_rsp(file);
        std::string digest = lower(to_hex(sha3_256(
            ByteView(reinterpret_cast<const uint8_t*>(text.data()), text.size()))));
        auto pin = pins.find(kat_filename(entry));
        if (pin == pins.end()) {
            notes.push_back(std::string(entry.name) + ": no pinned digest for " +
                            kat_filename(entry));
            continue;
        }
        if (digest != pin->second) {
            notes.push_back(std::string(entry.name) + ": full-file digest mismatch (" + digest +
                            " != " + pin->second + ")");
            continue;
        }

        // Field-level spot check against the stored count-0 vectors.
        auto fixture = parse_rsp(read_file(dir + "/tests/data/" +
                                           kat_filename(entry).substr(0, kat_filename(entry).size() - 4) +
                                           ".first3.rsp"));
        bool fields_ok = true;
        if (entry.is_kem) {
            const auto& a = file.kem_cases.at(0);
            const auto& b = fixture.kem_cases.at(0);
            fields_ok = a.seed == b.seed && a.pk == b.pk && a.sk == b.sk && a.ct == b.ct &&
                        a.ss == b.ss;
        } else {
            const auto& a = file.sign_cases.at(0);
            const auto& b = fixture.sign_cases.at(0);
            fields_ok = a.seed == b.seed && a.mlen == b.mlen && a.msg == b.msg && a.pk == b.pk &&
                        a.sk == b.sk && a.smlen == b.smlen && a.sm == b.sm;
        }
        if (!fields_ok) {
            notes.push_back(std::string(entry.name) + ": count-0 field mismatch against stored vectors");
            continue;
        }
        ++ok;
    }
    std::ostringstream s;
    s << ok << "/" << checked
      << " schemes byte-identical to the published round-3 KAT files (full-file digest plus "
         "count-0 seed/pk/sk/output fields)";
    summary = s.str();
    return ok == checked && checked == 6;
}

// --- criterion 3: calibration table replay -----------------------------------

bool criterion3(std::string& summary, Notes& notes) {
    const auto& rows = shipped_timing();
    if (rows.size() != 24) {
        summary = "expected 24 timing rows, found " + std::to_string(rows.size());
        return false;
    }

    bool anchor_seen = false;
    int within = 0;
    double worst = 0.0;
    for (const auto& row : rows) {
        double modeled = modeled_mean_us(row.calibration.model);
        double delta = std::fabs(modeled - row.stated_mean_us);
        worst = std::max(worst, delta);
        if (delta <= 1e-3) ++within;
        else
            notes.push_back(row.calibration.pe_name + "/" +
                            platform_name(row.calibration.platform) + ": modeled " +
                            fmt(modeled, 6) + " vs stated " + fmt(row.stated_mean_us, 6));
        if (row.calibration.pe_name == "kyber2_enc" &&
            row.calibration.platform == Platform::VC709) {
            anchor_seen = std::fabs(row.stated_mean_us - 683.862819) < 1e-9;
        }
    }
    if (!anchor_seen) notes.push_back("anchor row kyber2_enc/VC709 = 683.862819 us missing");

    // One live job must report exactly the table's phases.
    bool replay_ok = false;
    {
        ModeledBackend backend(shipped_pe_descriptors(Platform::VC709), shipped_calibration());
        const auto* pe = backend.find_pe("kyber2_enc");
        Workload wl(*registry_lookup(Family::kyber, 1), Operation::encapsulate);
        auto [outputs, timing] = backend.run_job(*pe, wl.next());
        replay_ok = std::fabs(timing.total_ns - 683862.819) < 1e-6 &&
                    std::fabs(timing.start_ns - 33879.021) < 1e-6 &&
                    std::fabs(timing.wait_ns - 625722.209) < 1e-6 &&
                    std::fabs(timing.release_ns - 24261.589) < 1e-6 && !outputs.out0.empty();
        if (!replay_ok) notes.push_back("modeled kyber2_enc/VC709 job did not replay the table phases");
    }

    std::ostringstream s;
    s << within << "/24 modeled means within 1e-3 us of the dataset column (worst delta "
      << fmt(worst, 12) << " us), anchor kyber2_enc/VC709 = 683.862819";
    summary = s.str();
    return within == 24 && anchor_seen && replay_ok;
}

// --- criterion 4: resource-total bar labels ----------------------------------

bool criterion4(std::string& summary, Notes& notes) {
    struct Spot {
        const char* pe;
        Platform platform;
        long expected;
    };
    const Spot spots[] = {
        {"kyber2_enc", Platform::VC709, 305},     {"kyber4_dec", Platform::VC709, 355},
        {"dilithium2_sign", Platform::VC709, 314}, {"dilithium3_sign", Platform::VC709, 322},
        {"dilithium5_verify", Platform::VC709, 226}, {"kyber2_enc", Platform::AU280, 285},
        {"kyber4_dec", Platform::AU280, 334},     {"dilithium2_sign", Platform::AU280, 296},
        {"dilithium3_sign", Platform::AU280, 302}, {"dilithium5_verify", Platform::AU280, 206},
    };

    const auto& records = shipped_resources();
    int ok = 0;
    for (const auto& spot : spots) {
        auto it = std::find_if(records.begin(), records.end(), [&](const ResourceRecord& r) {
            return r.pe_name == spot.pe && r.platform == spot.platform;
        });
        if (it == records.end()) {
            notes.push_back(std::string(spot.pe) + "/" + platform_name(spot.platform) +
                            ": row missing");
            continue;
        }
        long got = rounded_total(resource_total(*it));
        if (got == spot.expected) {
            ++ok;
        } else {
            notes.push_back(std::string(spot.pe) + "/" + platform_name(spot.platform) +
                            ": rounded total " + std::to_string(got) + " != " +
                            std::to_string(spot.expected));
        }
    }
    std::ostringstream s;
    s << ok << "/" << std::size(spots)
      << " rounded resource totals match the published bar labels";
    summary = s.str();
    return ok == static_cast<int>(std::size(spots));
}

// --- criterion 5: cross-platform frequency ratios ----------------------------

bool criterion5(std::string& summary, Notes& notes) {
    const auto& records = shipped_resources();
    std::vector<ResourceRecord> au280, vc709;
    for (const auto& r : records) {
        (r.platform == Platform::AU280 ? au280 : vc709).push_back(r);
    }
    auto ratios = frequency_ratio(au280, vc709);
    double kyber_ratio = ratios.at(Family::kyber);
    double dilithium_ratio = ratios.at(Family::dilithium);

    bool kyber_ok = std::fabs(kyber_ratio - 1.6) <= 0.1;
    bool dilithium_ok = std::fabs(dilithium_ratio - 1.3) <= 0.1;

    notes.push_back("kyber AU280/VC709 frequency geomean = " + fmt(kyber_ratio) +
                    ", stated 1.6 +/- 0.1: " + (kyber_ok ? "within band" : "OUTSIDE band"));
    notes.push_back("dilithium AU280/VC709 frequency geomean = " + fmt(dilithium_ratio) +
                    ", stated 1.3 +/- 0.1: " + (dilithium_ok ? "within band" : "OUTSIDE band"));

    if (!dilithium_ok) {
        std::vector<ResourceRecord> au_v, vc_v;
        for (const auto& r : au280)
            if (r.family == Family::dilithium && r.operation == Operation::verify)
                au_v.push_back(r);
        for (const auto& r : vc709)
            if (r.family == Family::dilithium && r.operation == Operation::verify)
                vc_v.push_back(r);
        double verify_only = frequency_ratio(au_v, vc_v).at(Family::dilithium);
        notes.push_back("restricted to the three dilithium verify PEs the geomean is " +
                        fmt(verify_only) + ", inside the stated band; the sign-PE frequency "
                        "pairs in the shipped dataset pull the family-wide mean above it");
        notes.push_back("values are computed from the shipped dataset as-is; the stated 1.3 "
                        "is inconsistent with that dataset's sign rows, so this criterion "
                        "fails honestly rather than adjusting either side");
    }

    std::ostringstream s;
    s << "frequency ratio bands: kyber " << fmt(kyber_ratio, 4) << " (target 1.6 +/- 0.1) "
      << (kyber_ok ? "ok" : "violated") << ", dilithium " << fmt(dilithium_ratio, 4)
      << " (target 1.3 +/- 0.1) " << (dilithium_ok ? "ok" : "violated");
    summary = s.str();
    return kyber_ok && dilithium_ok;
}

// --- criterion 6: invariant property suites ----------------------------------

bool criterion6(std::string& summary, Notes& notes) {
    std::mt19937_64 rng(0x70726f70);
    bool all_ok = true;
    auto fail = [&](const std::string& what) {
        notes.push_back(what);
        all_ok = false;
    };

    // NTT roundtrips, 1000 random polynomials per ring.
    {
        int ok = 0;
        for (int t = 0; t < 1000; ++t) {
            kyber::KPoly p;
            for (auto& c : p) c = static_cast<uint16_t>(rng() % kyber::Q);
            if (kyber::inv_ntt(kyber::ntt(p)) == p) ++ok;
        }
        if (ok != 1000) fail("kyber ntt roundtrip: " + std::to_string(ok) + "/1000");
        ok = 0;
        for (int t = 0; t < 1000; ++t) {
            dilithium::DPoly p;
            for (auto& c : p) c = static_cast<int32_t>(rng() % dilithium::Q);
            if (dilithium::d_inv_ntt(dilithium::d_ntt(p)) == p) ++ok;
        }
        if (ok != 1000) fail("dilithium ntt roundtrip: " + std::to_string(ok) + "/1000");
    }

    // Kyber compress error bound, exhaustive over all residues.
    for (int d : {4, 5, 10, 11}) {
        long bound = std::lround(static_cast<double>(kyber::Q) / (1 << (d + 1)));
        for (int x = 0; x < kyber::Q; ++x) {
            uint16_t y = kyber::compress(static_cast<uint16_t>(x), d);
            if (y >= (1u << d)) {
                fail("compress d=" + std::to_string(d) + " output out of range at x=" +
                     std::to_string(x));
                break;
            }
            int x2 = kyber::decompress(y, d);
            int diff = std::abs(x2 - x);
            int dist = std::min(diff, kyber::Q - diff);
            if (dist > bound) {
                fail("compress d=" + std::to_string(d) + " error " + std::to_string(dist) +
                     " > bound " + std::to_string(bound) + " at x=" + std::to_string(x));
                break;
            }
        }
    }

    // Dilithium hint recovery on sampled (r, z) mirroring the signing accept path.
    for (int mode : {2, 3, 5}) {
        const auto& p = dilithium::params_for_mode(mode);
        const int32_t g2 = p.gamma2;
        int accepted = 0;
        int bad = 0;
        long attempts = 0;
        while (accepted < 5000 && attempts < 2000000) {
            ++attempts;
            int32_t w = static_cast<int32_t>(rng() % dilithium::Q);
            auto [w1, w0] = dilithium::decompose(w, g2);
            int32_t e1 = static_cast<int32_t>(rng() % (2 * p.beta + 1)) - p.beta;
            if (std::abs(w0 - e1) > g2 - p.beta - 1) continue;
            int32_t e2 = static_cast<int32_t>(rng() % (2 * (g2 - 1) + 1)) - (g2 - 1);
            bool hint = dilithium::make_hint(w0 - e1 + e2, w1, g2);
            int64_t v = (static_cast<int64_t>(w) - e1 + e2) % dilithium::Q;
            if (v < 0) v += dilithium::Q;
            if (dilithium::use_hint(static_cast<int32_t>(v), hint, g2) != w1) ++bad;
            ++accepted;
        }
        if (accepted < 5000) fail("hint recovery mode " + std::to_string(mode) + ": sampler starved");
        if (bad != 0)
            fail("hint recovery mode " + std::to_string(mode) + ": " + std::to_string(bad) +
                 " failures in " + std::to_string(accepted) + " samples");
    }

    auto rand_bytes = [&](size_t n) {
        Bytes out(n);
        for (auto& b : out) b = static_cast<uint8_t>(rng());
        return out;
    };

    // KEM roundtrips, 200 trials per level.
    for (int level : {1, 3, 5}) {
        const auto& p = kyber::params_for_level(level);
        int ok = 0;
        for (int t = 0; t < 200; ++t) {
            auto [pk, sk] = kyber::kem_keygen(rand_bytes(64), p);
            auto [ct, ss] = kyber::kem_enc_derand(pk, rand_bytes(32), p);
            if (kyber::kem_dec(sk, ct, p) == ss && ss.size() == 32) ++ok;
        }
        if (ok != 200) fail("kem roundtrip level " + std::to_string(level) + ": " +
                            std::to_string(ok) + "/200");
    }

    // Signature roundtrips, 200 trials per level.
    for (int mode : {2, 3, 5}) {
        const auto& p = dilithium::params_for_mode(mode);
        int ok = 0;
        for (int t = 0; t < 200; ++t) {
            auto [pk, sk] = dilithium::keygen(rand_bytes(32), p);
            Bytes msg = rand_bytes(1 + rng() % 64);
            auto signed_msg = dilithium::sign(sk, msg, p);
            auto recovered = dilithium::verify(pk, signed_msg.sm, p);
            if (recovered && *recovered == msg && signed_msg.iterations >= 1) ++ok;
        }
        if (ok != 200) fail("signature roundtrip mode " + std::to_string(mode) + ": " +
                            std::to_string(ok) + "/200");
    }

    // Implicit rejection on mutated ciphertexts, every level.
    for (int level : {1, 3, 5}) {
        const auto& p = kyber::params_for_level(level);
        auto [pk, sk] = kyber::kem_keygen(rand_bytes(64), p);
        auto [ct, ss] = kyber::kem_enc_derand(pk, rand_bytes(32), p);
        int ok = 0;
        for (int t = 0; t < 50; ++t) {
            Bytes bad = ct;
            bad[(t * 37) % bad.size()] ^= static_cast<uint8_t>(1 + t % 255);
            Bytes ss_bad = kyber::kem_dec(sk, bad, p);
            if (ss_bad.size() == 32 && ss_bad != ss && kyber::kem_dec(sk, bad, p) == ss_bad) ++ok;
        }
        if (ok != 50) fail("implicit rejection level " + std::to_string(level) + ": " +
                           std::to_string(ok) + "/50");
    }

    // Signature rejection on mutated signatures, every mode.
    for (int mode : {2, 3, 5}) {
        const auto& p = dilithium::params_for_mode(mode);
        auto [pk, sk] = dilithium::keygen(rand_bytes(32), p);
        Bytes msg = rand_bytes(33);
        auto sm = dilithium::sign(sk, msg, p).sm;
        int ok = 0;
        for (int t = 0; t < 20; ++t) {
            Bytes bad = sm;
            bad[(t * sm.size()) / 20] ^= static_cast<uint8_t>(1 + t);
            if (!dilithium::verify(pk, bad, p)) ++ok;
        }
        Bytes truncated(sm.begin(), sm.begin() + p.sig_len - 1);
        if (!dilithium::verify(pk, truncated, p)) ++ok;
        if (ok != 21) fail("signature rejection mode " + std::to_string(mode) + ": " +
                           std::to_string(ok) + "/21");
    }

    summary = all_ok ? "ntt roundtrips, compress scan, hint recovery, kem/signature "
                       "roundtrips, and both rejection paths all hold"
                     : "one or more property suites failed";
    return all_ok;
}

// --- criterion 7: primitive vectors -------------------------------------------

bool criterion7(std::string& summary, Notes& notes) {
    bool ok = true;
    auto expect = [&](const std::string& what, const std::string& got, const std::string& want) {
        if (got != want) {
            notes.push_back(what + ": got " + got);
            ok = false;
        }
    };

    expect("sha3-256 empty", to_hex(sha3_256(Bytes{})),
           "A7FFC6F8BF1ED76651C14756A061D662F580FF4DE43B49FA82D80A4B80F8434A");
    expect("sha3-512 empty", to_hex(sha3_512(Bytes{})),
           "A69F73CCA23A9AC5C8B567DC185A756E97C982164FE25859E0D1DCC1475C80A6"
           "15B2123AF1F5F94C11E3E9402C3AC558F500199D95B6D3E301758586281DCD26");
    expect("shake128 empty/32", to_hex(shake128(Bytes{}, 32)),
           "7F9C2BA4E88F827D616045507605853ED73B8093F6EFBC88EB1A6EACFA66EF26");
    expect("shake256 empty/32", to_hex(shake256(Bytes{}, 32)),
           "46B9DD2B0BA88D13233B3FEB743EEB243FCD52EA62B81B82B50C27646ED5762F");

    Aes256 aes(from_hex("000102030405060708090A0B0C0D0E0F101112131415161718191A1B1C1D1E1F"));
    auto ct = aes.encrypt_block(from_hex("00112233445566778899AABBCCDDEEFF"));
    expect("aes-256 block", to_hex(ByteView(ct)), "8EA2B7CA516745BFEAFC49904B496089");

    summary = "FIPS 202 empty-message digests and the FIPS 197 AES-256 block vector match";
    return ok;
}

// --- criterion 8: hardware results not reproducible; substitutes verified -----

bool criterion8(std::string& summary, Notes& notes) {
    notes.push_back(
        "not reproducible in this environment: absolute AVX2 software timings, wall-clock "
        "measurements on physical FPGA hosts, synthesized resource and frequency results, "
        "and the roughly one-order-of-magnitude software-vs-PE latency gap");
    notes.push_back(
        "substitutes: deterministic replay of the recorded timing dataset (criterion 3), "
        "resource/frequency consistency checks (criteria 4 and 5), and the overhead "
        "comparison machinery checked here");

    bool ok = true;

    // Deterministic replay through the bench path.
    {
        ModeledBackend backend(shipped_pe_descriptors(Platform::VC709), shipped_calibration());
        const auto* pe = backend.find_pe("kyber2_enc");
        Workload wl(*registry_lookup(Family::kyber, 1), Operation::encapsulate);
        auto rec = run_bench(backend, *pe, wl, 3);
        if (std::fabs(rec.mean_total_us - 683.862819) > 1e-9 || rec.stddev_total_us > 1e-9 ||
            !rec.valid) {
            notes.push_back("modeled bench replay drifted from the dataset mean");
            ok = false;
        }

        // A live comparison must rank the modeled PE far above a software baseline
        // for the same operation, with overhead dominance flagged consistently.
        auto baseline = run_software_baseline(*registry_lookup(Family::kyber, 1),
                                              Operation::encapsulate, 50);
        auto cmp = compare(rec, baseline);
        if (!(cmp.total_ratio > 1.0) ||
            cmp.overhead_dominated != (cmp.overhead_ratio >= 1.0)) {
            notes.push_back("modeled-vs-software comparison lost overhead dominance invariants");
            ok = false;
        }
    }

    // Fixed-point check of the overhead ratio arithmetic.
    {
        BenchRecord rec;
        rec.mean_start_ns = 38101.868;
        rec.mean_release_ns = 19285.876;
        rec.mean_total_us = 562.625529;
        rec.runs = 1;
        BenchRecord base;
        base.mean_total_us = 50.0;
        base.runs = 1;
        auto cmp = compare(rec, base);
        if (std::fabs(cmp.overhead_ratio - 1.14775488) > 1e-8 || !cmp.overhead_dominated) {
            notes.push_back("overhead ratio arithmetic drifted: got " + fmt(cmp.overhead_ratio));
            ok = false;
        }
    }

    summary = ok ? "hardware-only results are declared not reproducible; modeled replay and "
                   "overhead comparison substitutes verified"
                 : "substitute machinery checks failed";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc > 1) {
        int n = std::atoi(argv[1]);
        if (n < 1 || n > 8) {
            std::fprintf(stderr, "usage: %s [criterion 1-8]\n", argv[0]);
            return 64;
        }
        which.push_back(n);
    } else {
        for (int n = 1; n <= 8; ++n) which.push_back(n);
    }

    int failures = 0;
    for (int n : which) {
        std::string summary;
        Notes notes;
        bool ok = false;
        try {
            switch (n) {
                case 1: ok = criterion1(summary, notes); break;
                case 2: ok = criterion2(summary, notes); break;
                case 3: ok = criterion3(summary, notes); break;
                case 4: ok = criterion4(summary, notes); break;
                case 5: ok = criterion5(summary, notes); break;
                case 6: ok = criterion6(summary, notes); break;
                case 7: ok = criterion7(summary, notes); break;
                case 8: ok = criterion8(summary, notes); break;
            }
        } catch (const std::exception& e) {
            ok = false;
            summary = std::string("unhandled exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, summary.c_str());
        for (const auto& note : notes) std::printf("    note: %s\n", note.c_str());
        if (!ok) ++failures;
    }
    return failures;
}
