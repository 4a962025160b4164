#include "pqeval/device.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

namespace pqeval {

namespace {

double now_ns() {
    return static_cast<double>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

// Engine dispatch shared by both backends; timing is the caller's concern.
JobOutputs execute(const PeDescriptor& pe, ByteView a, ByteView b) {
    const SchemeEntry* entry = registry_lookup(pe.family, pe.nist_level);
    if (entry == nullptr) {
        throw NotFoundError("no registered scheme for PE " + pe.pe_name);
    }
    JobOutputs out;
    switch (pe.operation) {
        case Operation::encapsulate: {
            auto [ct, ss] = kem_apply(*entry, a, b);
            out.out0 = std::move(ct);
            out.out1 = std::move(ss);
            return out;
        }
        case Operation::decapsulate:
            out.out0 = kem_verify(*entry, a, b);
            return out;
        case Operation::sign:
            out.out0 = sig_apply(*entry, a, b);
            return out;
        case Operation::verify: {
            auto msg = sig_verify(*entry, a, b);
            out.accepted = msg.has_value();
            if (msg) {
                out.out0 = std::move(*msg);
            }
            return out;
        }
        case Operation::keypair:
            break;
    }
    throw std::invalid_argument("operation is not dispatchable to a PE");
}

}  // namespace

const char* platform_name(Platform p) { return p == Platform::VC709 ? "VC709" : "AU280"; }

std::optional<Platform> platform_from_string(std::string_view s) {
    if (s == "VC709") return Platform::VC709;
    if (s == "AU280") return Platform::AU280;
    return std::nullopt;
}

const char* health_name(PeHealth h) { return h == PeHealth::Working ? "Working" : "Deadlock"; }

std::optional<PeHealth> health_from_string(std::string_view s) {
    if (s == "Working") return PeHealth::Working;
    if (s == "Deadlock") return PeHealth::Deadlock;
    return std::nullopt;
}

std::string pe_name_for(Family family, int nist_level, Operation op) {
    const SchemeEntry* entry = registry_lookup(family, nist_level);
    if (entry == nullptr) {
        throw std::invalid_argument("unregistered scheme combo");
    }
    if (family == Family::kyber) {
        if (op != Operation::encapsulate && op != Operation::decapsulate) {
            throw std::invalid_argument("kyber PEs implement encapsulate or decapsulate");
        }
        return "kyber" + std::to_string(entry->kem->kyber_k) +
               (op == Operation::encapsulate ? "_enc" : "_dec");
    }
    if (op != Operation::sign && op != Operation::verify) {
        throw std::invalid_argument("dilithium PEs implement sign or verify");
    }
    return "dilithium" + std::to_string(entry->sig->mode) +
           (op == Operation::sign ? "_sign" : "_verify");
}

double modeled_mean_us(const OverheadModel& m) {
    return (m.start_ns + m.wait_ns + m.release_ns) / 1000.0;
}

CalibrationMap load_calibration(const std::vector<CalibrationRow>& rows) {
    CalibrationMap map;
    for (const auto& row : rows) {
        if (row.model.start_ns < 0 || row.model.wait_ns < 0 || row.model.release_ns < 0) {
            throw DataError("negative overhead phase for " + row.pe_name + "/" +
                            platform_name(row.platform));
        }
        auto [it, inserted] = map.emplace(CalibrationKey{row.pe_name, row.platform}, row.model);
        if (!inserted) {
            throw DataError("duplicate calibration key " + row.pe_name + "/" +
                            platform_name(row.platform));
        }
    }
    return map;
}

const PeDescriptor* Backend::find_pe(std::string_view pe_name) const {
    for (const auto& pe : pes_) {
        if (pe.pe_name == pe_name) {
            return &pe;
        }
    }
    return nullptr;
}

const PeDescriptor* Backend::find_pe(Family family, int nist_level, Operation op) const {
    for (const auto& pe : pes_) {
        if (pe.family == family && pe.nist_level == nist_level && pe.operation == op) {
            return &pe;
        }
    }
    return nullptr;
}

std::pair<JobOutputs, JobTiming> Backend::run_job(const PeDescriptor& pe, const JobArgs& args) {
    const PeDescriptor* registered = find_pe(pe.pe_name);
    if (registered == nullptr || registered->platform != pe.platform) {
        throw NotFoundError("PE not registered with this backend: " + pe.pe_name);
    }
    if (registered->functionality == PeHealth::Deadlock) {
        if (simulate_deadlock_ms_) {
            std::this_thread::sleep_for(std::chrono::milliseconds(*simulate_deadlock_ms_));
            throw JobTimeoutError("job on " + pe.pe_name + " timed out after " +
                                  std::to_string(*simulate_deadlock_ms_) + " ms");
        }
        if (!warned_deadlock_) {
            std::fprintf(stderr, "warning: PE %s is flagged Deadlock; executing normally\n",
                         registered->pe_name.c_str());
            warned_deadlock_ = true;
        }
    }
    return run_job_impl(*registered, args);
}

double timer_overhead_ns() {
    static const double overhead = [] {
        std::vector<double> samples(1001);
        for (auto& s : samples) {
            double t0 = now_ns();
            double t1 = now_ns();
            s = t1 - t0;
        }
        std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
        return samples[samples.size() / 2];
    }();
    return overhead;
}

SoftwareBackend::SoftwareBackend(std::vector<PeDescriptor> pes) : Backend(std::move(pes)) {
    timer_overhead_ns();
}

SoftwareBackend SoftwareBackend::with_all_pes(Platform platform) {
    std::vector<PeDescriptor> pes;
    for (const auto& entry : registry_all()) {
        auto ops = entry.is_kem
                       ? std::pair{Operation::encapsulate, Operation::decapsulate}
                       : std::pair{Operation::sign, Operation::verify};
        for (Operation op : {ops.first, ops.second}) {
            pes.push_back(PeDescriptor{pe_name_for(entry.family, entry.nist_level, op),
                                       entry.family, entry.nist_level, op, platform, 0,
                                       PeHealth::Working});
        }
    }
    return SoftwareBackend(std::move(pes));
}

std::pair<JobOutputs, JobTiming> SoftwareBackend::run_job_impl(const PeDescriptor& pe,
                                                               const JobArgs& args) {
    const double tick = timer_overhead_ns();
    double t0 = now_ns();
    Bytes a(args.a.begin(), args.a.end());
    Bytes b(args.b.begin(), args.b.end());
    double t1 = now_ns();
    JobOutputs computed = execute(pe, a, b);
    double t2 = now_ns();
    JobOutputs out = std::move(computed);
    double t3 = now_ns();

    JobTiming timing;
    timing.start_ns = std::max(0.0, t1 - t0 - tick);
    timing.wait_ns = std::max(0.0, t2 - t1 - tick);
    timing.release_ns = std::max(0.0, t3 - t2 - tick);
    timing.total_ns = timing.start_ns + timing.wait_ns + timing.release_ns;
    return {std::move(out), timing};
}

ModeledBackend::ModeledBackend(std::vector<PeDescriptor> pes, CalibrationMap calibration)
    : Backend(std::move(pes)), calibration_(std::move(calibration)) {
    for (const auto& pe : pes_) {
        if (calibration_.find({pe.pe_name, pe.platform}) == calibration_.end()) {
            throw DataError("no calibration entry for " + pe.pe_name + "/" +
                            platform_name(pe.platform));
        }
    }
}

std::pair<JobOutputs, JobTiming> ModeledBackend::run_job_impl(const PeDescriptor& pe,
                                                              const JobArgs& args) {
    JobOutputs out = execute(pe, args.a, args.b);
    const OverheadModel& m = calibration_.at({pe.pe_name, pe.platform});
    JobTiming timing{m.start_ns, m.wait_ns, m.release_ns, m.start_ns + m.wait_ns + m.release_ns};
    return {std::move(out), timing};
}

}  // namespace pqeval
