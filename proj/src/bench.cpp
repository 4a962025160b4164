#include "pqeval/bench.hpp"

#include <chrono>
#include <cmath>

#include "pqeval/keccak.hpp"

namespace pqeval {

namespace {

double now_ns() {
    return static_cast<double>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

Bytes workload_entropy(const SchemeEntry& entry, Operation op, std::uint64_t seed) {
    Bytes material;
    material.reserve(std::string_view(entry.name).size() + 16);
    for (char c : std::string_view(entry.name)) material.push_back(static_cast<uint8_t>(c));
    material.push_back(static_cast<uint8_t>(op));
    for (int i = 0; i < 8; ++i) material.push_back(static_cast<uint8_t>(seed >> (8 * i)));
    return shake256(material, 48);
}

struct Stats {
    int runs = 0;
    double sum_start = 0, sum_wait = 0, sum_release = 0;
    double sum_total_us = 0, sum_total_us_sq = 0;

    void add(const JobTiming& t) {
        ++runs;
        sum_start += t.start_ns;
        sum_wait += t.wait_ns;
        sum_release += t.release_ns;
        double us = t.total_ns / 1000.0;
        sum_total_us += us;
        sum_total_us_sq += us * us;
    }

    void fill(BenchRecord& r) const {
        r.runs = runs;
        if (runs == 0) return;
        r.mean_start_ns = sum_start / runs;
        r.mean_wait_ns = sum_wait / runs;
        r.mean_release_ns = sum_release / runs;
        r.mean_total_us = sum_total_us / runs;
        double var = sum_total_us_sq / runs - r.mean_total_us * r.mean_total_us;
        r.stddev_total_us = var > 0 ? std::sqrt(var) : 0.0;
    }
};

}  // namespace

Workload::Workload(const SchemeEntry& entry, Operation op, std::uint64_t seed, bool fresh_inputs)
    : entry_(&entry), op_(op), fresh_(fresh_inputs), rng_(workload_entropy(entry, op, seed)) {
    if (entry.is_kem ? (op != Operation::encapsulate && op != Operation::decapsulate)
                     : (op != Operation::sign && op != Operation::verify)) {
        throw std::invalid_argument("operation does not belong to the scheme");
    }
    auto [pk, sk] = keypair_from_drbg(entry, rng_);
    pk_ = std::move(pk);
    sk_ = std::move(sk);
}

void Workload::refill() {
    switch (op_) {
        case Operation::encapsulate:
            a_ = pk_;
            b_ = rng_.generate(entry_->kem->coins_len);
            break;
        case Operation::decapsulate: {
            a_ = sk_;
            Bytes coins = rng_.generate(entry_->kem->coins_len);
            b_ = kem_apply(*entry_, pk_, coins).first;
            break;
        }
        case Operation::sign:
            a_ = sk_;
            b_ = rng_.generate(33);
            break;
        case Operation::verify: {
            a_ = pk_;
            Bytes msg = rng_.generate(33);
            b_ = sig_apply(*entry_, sk_, msg);
            break;
        }
        case Operation::keypair:
            throw std::invalid_argument("keypair is not a benchable operation");
    }
}

JobArgs Workload::next() {
    if (fresh_ || !primed_) {
        refill();
        primed_ = true;
    }
    return JobArgs{a_, b_};
}

BenchRecord run_bench(Backend& backend, const PeDescriptor& pe, Workload& workload, int n,
                      bool warmup) {
    if (n < 1) {
        throw std::invalid_argument("run count must be at least 1");
    }
    BenchRecord record;
    record.id = pe.pe_name + "/" + platform_name(pe.platform);
    Stats stats;
    try {
        if (warmup) {
            (void)backend.run_job(pe, workload.next());
        }
        for (int i = 0; i < n; ++i) {
            auto [out, timing] = backend.run_job(pe, workload.next());
            (void)out;
            stats.add(timing);
        }
    } catch (const std::exception&) {
        stats.fill(record);
        record.valid = false;
        return record;
    }
    stats.fill(record);
    return record;
}

BenchRecord run_software_baseline(const SchemeEntry& entry, Operation op, int n,
                                  std::uint64_t seed, bool warmup) {
    if (n < 1) {
        throw std::invalid_argument("run count must be at least 1");
    }
    Workload workload(entry, op, seed);
    const double tick = timer_overhead_ns();
    auto invoke = [&](const JobArgs& args) {
        switch (op) {
            case Operation::encapsulate:
                (void)kem_apply(entry, args.a, args.b);
                break;
            case Operation::decapsulate:
                (void)kem_verify(entry, args.a, args.b);
                break;
            case Operation::sign:
                (void)sig_apply(entry, args.a, args.b);
                break;
            case Operation::verify:
                (void)sig_verify(entry, args.a, args.b);
                break;
            case Operation::keypair:
                break;
        }
    };

    BenchRecord record;
    record.id = std::string("software/") + entry.name + "/" + operation_name(op);
    Stats stats;
    if (warmup) {
        invoke(workload.next());
    }
    for (int i = 0; i < n; ++i) {
        JobArgs args = workload.next();
        double t0 = now_ns();
        invoke(args);
        double t1 = now_ns();
        JobTiming timing;
        timing.wait_ns = std::max(0.0, t1 - t0 - tick);
        timing.total_ns = timing.wait_ns;
        stats.add(timing);
    }
    stats.fill(record);
    return record;
}

CompareResult compare(const BenchRecord& record, const BenchRecord& baseline) {
    if (baseline.mean_total_us <= 0) {
        throw std::invalid_argument("baseline mean must be positive");
    }
    CompareResult result;
    result.total_ratio = record.mean_total_us / baseline.mean_total_us;
    result.overhead_ratio =
        (record.mean_start_ns + record.mean_release_ns) / (baseline.mean_total_us * 1000.0);
    result.overhead_dominated = result.overhead_ratio >= 1.0;
    return result;
}

}  // namespace pqeval
