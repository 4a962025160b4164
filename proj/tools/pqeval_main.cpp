#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pqeval/bench.hpp"
#include "pqeval/datasets.hpp"
#include "pqeval/device.hpp"
#include "pqeval/kat.hpp"
#include "pqeval/nist_api.hpp"
#include "pqeval/report.hpp"

namespace {

using namespace pqeval;
using ordered_json = nlohmann::ordered_json;

// Exit codes: 0 pass, 1 verification failure, 2 usage/config, 3 IO/data.
constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
}

std::string scheme_listing() {
    std::string lines;
    for (const auto& entry : registry_all()) {
        lines += "  --family ";
        lines += family_name(entry.family);
        lines += " --level " + std::to_string(entry.nist_level) + "  (" + entry.name + ")\n";
    }
    return lines;
}

const SchemeEntry& lookup_or_usage(const std::string& family_str, int level) {
    auto family = family_from_string(family_str);
    if (!family) {
        throw UsageError("unknown family '" + family_str + "'");
    }
    const SchemeEntry* entry = registry_lookup(*family, level);
    if (entry == nullptr) {
        throw UsageError("no registered scheme for " + family_str + " level " +
                         std::to_string(level));
    }
    return *entry;
}

Operation operation_or_usage(const std::string& op_str, const SchemeEntry& entry) {
    auto op = operation_from_string(op_str);
    if (!op) {
        throw UsageError("unknown operation '" + op_str + "'");
    }
    bool kem_op = *op == Operation::encapsulate || *op == Operation::decapsulate;
    bool sig_op = *op == Operation::sign || *op == Operation::verify;
    if ((entry.is_kem && !kem_op) || (!entry.is_kem && !sig_op)) {
        throw UsageError(std::string("operation '") + op_str + "' does not belong to " +
                         entry.name);
    }
    return *op;
}

Platform platform_or_usage(const std::string& platform_str) {
    auto p = platform_from_string(platform_str);
    if (!p) {
        throw UsageError("unknown platform '" + platform_str + "'");
    }
    return *p;
}

// --calibration beats PQEVAL_CALIBRATION beats the embedded dataset.
CalibrationMap resolve_calibration(const std::string& calibration_path) {
    std::string path = calibration_path;
    if (path.empty()) {
        if (const char* env = std::getenv("PQEVAL_CALIBRATION")) {
            path = env;
        }
    }
    if (path.empty()) {
        return shipped_calibration();
    }
    return load_calibration(calibration_rows(parse_timing_csv(read_file(path))));
}

std::unique_ptr<Backend> make_backend(const std::string& backend_str, Platform platform,
                                      const std::string& calibration_path,
                                      std::optional<int> simulate_deadlock_ms) {
    std::unique_ptr<Backend> backend;
    if (backend_str == "software") {
        backend = std::make_unique<SoftwareBackend>(SoftwareBackend::with_all_pes(platform));
    } else if (backend_str == "modeled") {
        backend = std::make_unique<ModeledBackend>(shipped_pe_descriptors(platform),
                                                   resolve_calibration(calibration_path));
    } else {
        throw UsageError("unknown backend '" + backend_str + "'");
    }
    backend->set_simulate_deadlock(simulate_deadlock_ms);
    return backend;
}

std::string bench_csv(const BenchRecord& r, const BenchRecord* baseline) {
    char buf[512];
    std::string csv =
        "ID,Runs,Mean Duration [us],Mean Start [ns],Mean Wait [ns],Mean Release [ns],"
        "Stddev [us],Valid";
    if (baseline != nullptr) {
        csv += ",Baseline ID,Baseline Mean [us],Total Ratio,Overhead Ratio,Overhead Dominated";
    }
    csv += '\n';
    std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%s", r.id.c_str(), r.runs,
                  r.mean_total_us, r.mean_start_ns, r.mean_wait_ns, r.mean_release_ns,
                  r.stddev_total_us, r.valid ? "true" : "false");
    csv += buf;
    if (baseline != nullptr) {
        CompareResult cmp = compare(r, *baseline);
        std::snprintf(buf, sizeof(buf), ",%s,%.6f,%.6f,%.6f,%s", baseline->id.c_str(),
                      baseline->mean_total_us, cmp.total_ratio, cmp.overhead_ratio,
                      cmp.overhead_dominated ? "true" : "false");
        csv += buf;
    }
    csv += '\n';
    return csv;
}

int cmd_kat_gen(const std::string& family_str, int level, int count,
                const std::string& entropy_hex, std::string out_path) {
    const SchemeEntry& entry = lookup_or_usage(family_str, level);
    if (count < 1) {
        throw UsageError("--count must be at least 1");
    }
    Bytes entropy;
    if (entropy_hex.empty()) {
        entropy.resize(48);
        for (int i = 0; i < 48; ++i) entropy[static_cast<std::size_t>(i)] = static_cast<uint8_t>(i);
    } else {
        entropy = from_hex(entropy_hex);
        if (entropy.size() != 48) {
            throw UsageError("--entropy must be 48 bytes (96 hex digits)");
        }
    }
    if (out_path.empty()) {
        out_path = std::string(entry.is_kem ? "PQCkemKAT_" : "PQCsignKAT_") +
                   std::to_string(entry.sk_len()) + ".rsp";
    }
    KatFile file = generate_kat(entry, count, entropy);
    write_text(out_path, write_rsp(file));
    std::printf("wrote %s (%d cases, %s)\n", out_path.c_str(), count, entry.name);
    return kExitPass;
}

int cmd_kat_verify(const std::string& path, const std::string& family_str, int level,
                   const std::string& backend_str, const std::string& platform_str,
                   const std::string& calibration_path, const std::string& json_path,
                   std::optional<int> simulate_deadlock_ms) {
    const SchemeEntry& entry = lookup_or_usage(family_str, level);
    Platform platform = platform_or_usage(platform_str);
    KatFile file = parse_rsp(read_file(path));
    auto backend = make_backend(backend_str, platform, calibration_path, simulate_deadlock_ms);

    KatReport report = run_kat(*backend, entry, file);
    for (const auto& c : report.cases) {
        if (!c.pass) {
            std::printf("case %d: FAIL (%s)\n", c.count, c.first_mismatch.c_str());
        }
    }
    std::printf("%s: %d/%zu cases passed (%s backend)\n", entry.name, report.passed,
                report.cases.size(), backend_str.c_str());

    if (!json_path.empty()) {
        ordered_json doc;
        doc["scheme"] = entry.name;
        doc["file"] = path;
        doc["backend"] = backend_str;
        doc["platform"] = platform_name(platform);
        doc["total"] = report.cases.size();
        doc["passed"] = report.passed;
        ordered_json cases = ordered_json::array();
        for (const auto& c : report.cases) {
            cases.push_back({{"count", c.count},
                             {"pass", c.pass},
                             {"first_mismatch", c.first_mismatch}});
        }
        doc["cases"] = std::move(cases);
        if (backend_str == "modeled") {
            ordered_json timing;
            CalibrationMap calib = resolve_calibration(calibration_path);
            auto ops = entry.is_kem
                           ? std::array<Operation, 2>{Operation::encapsulate, Operation::decapsulate}
                           : std::array<Operation, 2>{Operation::sign, Operation::verify};
            for (Operation op : ops) {
                const PeDescriptor* pe = backend->find_pe(entry.family, entry.nist_level, op);
                const OverheadModel& m = calib.at({pe->pe_name, pe->platform});
                timing[operation_name(op)] = {{"pe", pe->pe_name},
                                              {"start_ns", m.start_ns},
                                              {"wait_ns", m.wait_ns},
                                              {"release_ns", m.release_ns},
                                              {"mean_us", modeled_mean_us(m)}};
            }
            doc["modeled_timing"] = std::move(timing);
        }
        write_text(json_path, doc.dump(2) + "\n");
    }
    return report.all_pass() ? kExitPass : kExitVerifyFail;
}

int cmd_bench(const std::string& family_str, int level, const std::string& op_str,
              const std::string& backend_str, const std::string& platform_str, int runs,
              bool no_warmup, std::uint64_t seed, const std::string& calibration_path,
              std::optional<int> simulate_deadlock_ms, bool with_baseline,
              const std::string& out_path) {
    const SchemeEntry& entry = lookup_or_usage(family_str, level);
    Operation op = operation_or_usage(op_str, entry);
    Platform platform = platform_or_usage(platform_str);
    if (runs < 1) {
        throw UsageError("--runs must be at least 1");
    }
    auto backend = make_backend(backend_str, platform, calibration_path, simulate_deadlock_ms);
    const PeDescriptor* pe = backend->find_pe(entry.family, entry.nist_level, op);
    if (pe == nullptr) {
        throw UsageError("backend has no PE for the requested operation");
    }
    Workload workload(entry, op, seed);
    BenchRecord record = run_bench(*backend, *pe, workload, runs, !no_warmup);
    std::optional<BenchRecord> baseline;
    if (with_baseline) {
        baseline = run_software_baseline(entry, op, runs, seed, !no_warmup);
    }
    std::string csv = bench_csv(record, baseline ? &*baseline : nullptr);
    if (out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_text(out_path, csv);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return record.valid ? kExitPass : kExitVerifyFail;
}

int cmd_report(const std::string& kind_str, const std::string& out_dir, int baseline_runs,
               std::uint64_t seed, const std::string& calibration_path) {
    if (kind_str != "fig1" && kind_str != "fig4" && kind_str != "fig6" && kind_str != "all") {
        throw UsageError("unknown report kind '" + kind_str + "'");
    }
    if (baseline_runs < 1) {
        throw UsageError("--runs must be at least 1");
    }
    std::vector<std::string> written;
    auto append = [&written](std::vector<std::string> paths) {
        written.insert(written.end(), paths.begin(), paths.end());
    };

    if (kind_str == "fig1" || kind_str == "all") {
        append(emit_fig1(shipped_resources(), out_dir));
    }
    if (kind_str == "fig4" || kind_str == "fig6" || kind_str == "all") {
        CalibrationMap calibration = resolve_calibration(calibration_path);
        // One host baseline per (scheme, operation), shared by both platforms.
        std::map<std::string, BenchRecord> baselines;
        std::vector<BenchPair> rows;
        for (Platform platform : {Platform::VC709, Platform::AU280}) {
            ModeledBackend backend(shipped_pe_descriptors(platform), calibration);
            for (const auto& pe : backend.pes()) {
                const SchemeEntry* entry = registry_lookup(pe.family, pe.nist_level);
                Workload workload(*entry, pe.operation, seed);
                BenchRecord record = run_bench(backend, pe, workload, 3);
                std::string key = std::string(entry->name) + "/" + operation_name(pe.operation);
                auto it = baselines.find(key);
                if (it == baselines.end()) {
                    it = baselines
                             .emplace(key, run_software_baseline(*entry, pe.operation,
                                                                 baseline_runs, seed))
                             .first;
                }
                rows.push_back(BenchPair{std::move(record), it->second});
            }
        }
        if (kind_str == "fig4" || kind_str == "all") {
            append(emit_fig4(rows, out_dir));
        }
        if (kind_str == "fig6" || kind_str == "all") {
            append(emit_fig6(rows, out_dir));
        }
    }
    for (const auto& path : written) {
        std::printf("wrote %s\n", path.c_str());
    }
    return kExitPass;
}

int cmd_emit_kernel_descriptor(const std::string& family_str, int level,
                               const std::string& op_str, const std::string& out_path) {
    const SchemeEntry& entry = lookup_or_usage(family_str, level);
    Operation op = operation_or_usage(op_str, entry);
    std::string pe_name = pe_name_for(entry.family, entry.nist_level, op);

    int scheme_idx = 0;
    for (const auto& e : registry_all()) {
        if (e.family == entry.family && e.nist_level == entry.nist_level) break;
        ++scheme_idx;
    }
    bool is_apply = op == Operation::encapsulate || op == Operation::sign;
    int id = scheme_idx * 2 + (is_apply ? 1 : 2);

    std::string flags = entry.is_kem
                            ? "-DKYBER_K=" + std::to_string(entry.kem->kyber_k)
                            : "-DDILITHIUM_MODE=" + std::to_string(entry.sig->mode);

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["name"] = pe_name;
    doc["description"] = std::string(entry.name) + " " + operation_name(op) +
                         " processing element behind the standard KEM/signature API";
    doc["id"] = id;
    doc["CompilerFlags"] = flags;
    std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text(out_path, text);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pqeval: verification and performance evaluation for post-quantum KEM and "
                 "signature processing elements\n\nRegistered schemes:\n" +
                 scheme_listing()};
    app.require_subcommand(1);

    std::string family, op_str, backend_str = "software", platform_str = "VC709";
    std::string path, out_path, json_path, calibration_path, entropy_hex, kind_str = "all";
    int level = 0, count = 100, runs = 1000;
    std::uint64_t seed = 0;
    bool no_warmup = false, with_baseline = false;
    int deadlock_ms = -1;

    auto* gen = app.add_subcommand("kat-gen", "Generate a KAT response file (.rsp)");
    gen->add_option("-f,--family", family, "kyber | dilithium")->required();
    gen->add_option("-l,--level", level, "NIST security level (kyber 1/3/5, dilithium 2/3/5)")
        ->required();
    gen->add_option("-n,--count", count, "number of cases (default 100)");
    gen->add_option("--entropy", entropy_hex, "master entropy, 96 hex digits (default 00..2F)");
    gen->add_option("-o,--out", out_path, "output path (default NIST name from sk length)");

    auto* ver = app.add_subcommand("kat-verify", "Verify a KAT response file against a backend");
    ver->add_option("path", path, ".rsp file")->required();
    ver->add_option("-f,--family", family, "kyber | dilithium")->required();
    ver->add_option("-l,--level", level, "NIST security level")->required();
    ver->add_option("-b,--backend", backend_str, "software | modeled (default software)");
    ver->add_option("-p,--platform", platform_str, "VC709 | AU280 (default VC709)");
    ver->add_option("--calibration", calibration_path,
                    "timing dataset CSV (default: PQEVAL_CALIBRATION or embedded)");
    ver->add_option("--json", json_path, "write the per-case report as JSON");
    ver->add_option("--simulate-deadlock", deadlock_ms,
                    "make Deadlock-flagged PEs time out after this many ms");

    auto* bench = app.add_subcommand("bench", "Repeated-invocation measurement of one PE");
    bench->add_option("-f,--family", family, "kyber | dilithium")->required();
    bench->add_option("-l,--level", level, "NIST security level")->required();
    bench->add_option("--operation", op_str, "encapsulate | decapsulate | sign | verify")
        ->required();
    bench->add_option("-b,--backend", backend_str, "software | modeled (default software)");
    bench->add_option("-p,--platform", platform_str, "VC709 | AU280 (default VC709)");
    bench->add_option("-n,--runs", runs, "measured iterations (default 1000)");
    bench->add_flag("--no-warmup", no_warmup, "skip the uncounted warmup iteration");
    bench->add_option("--seed", seed, "workload DRBG seed (default 0)");
    bench->add_option("--calibration", calibration_path,
                      "timing dataset CSV (default: PQEVAL_CALIBRATION or embedded)");
    bench->add_option("--simulate-deadlock", deadlock_ms,
                      "make Deadlock-flagged PEs time out after this many ms");
    bench->add_flag("--baseline", with_baseline, "also run the host software baseline and ratios");
    bench->add_option("-o,--out", out_path, "CSV output path (default stdout)");

    auto* rep = app.add_subcommand("report", "Emit figure data series (CSV + JSON)");
    rep->add_option("-k,--kind", kind_str, "fig1 | fig4 | fig6 | all (default all)");
    rep->add_option("-o,--out-dir", out_path, "output directory (default pqeval-report)")
        ->default_str("pqeval-report");
    rep->add_option("-n,--runs", runs, "software-baseline iterations (default 200)");
    rep->add_option("--seed", seed, "workload DRBG seed (default 0)");
    rep->add_option("--calibration", calibration_path,
                    "timing dataset CSV (default: PQEVAL_CALIBRATION or embedded)");

    auto* kd = app.add_subcommand("emit-kernel-descriptor",
                                  "Emit the JSON kernel descriptor for one PE");
    kd->add_option("-f,--family", family, "kyber | dilithium")->required();
    kd->add_option("-l,--level", level, "NIST security level")->required();
    kd->add_option("--operation", op_str, "encapsulate | decapsulate | sign | verify")->required();
    kd->add_option("-o,--out", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    std::optional<int> simulate_deadlock_ms;
    if (deadlock_ms >= 0) {
        simulate_deadlock_ms = deadlock_ms;
    }

    try {
        if (gen->parsed()) {
            return cmd_kat_gen(family, level, count, entropy_hex, out_path);
        }
        if (ver->parsed()) {
            return cmd_kat_verify(path, family, level, backend_str, platform_str,
                                  calibration_path, json_path, simulate_deadlock_ms);
        }
        if (bench->parsed()) {
            return cmd_bench(family, level, op_str, backend_str, platform_str, runs, no_warmup,
                             seed, calibration_path, simulate_deadlock_ms, with_baseline,
                             out_path);
        }
        if (rep->parsed()) {
            if (out_path.empty()) {
                out_path = "pqeval-report";
            }
            int baseline_runs = runs == 1000 ? 200 : runs;
            return cmd_report(kind_str, out_path, baseline_runs, seed, calibration_path);
        }
        if (kd->parsed()) {
            return cmd_emit_kernel_descriptor(family, level, op_str, out_path);
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const KatParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitIo;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitIo;
    } catch (const NotFoundError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitUsage;
}
