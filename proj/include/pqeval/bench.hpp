#pragma once

#include <cstdint>
#include <string>

#include "pqeval/device.hpp"
#include "pqeval/drbg.hpp"
#include "pqeval/nist_api.hpp"

namespace pqeval {

struct BenchRecord {
    std::string id;  // "<pe_name>/<platform>" or "software/<scheme>/<op>"
    int runs = 0;
    double mean_total_us = 0.0;
    double mean_start_ns = 0.0;
    double mean_wait_ns = 0.0;
    double mean_release_ns = 0.0;
    double stddev_total_us = 0.0;
    bool valid = true;  // false: a backend fault aborted the run partway
};

// Supplies KAT-style inputs for one (scheme, operation): one keypair for the
// whole workload, fresh data arguments per iteration (coins, ciphertexts, or
// messages). With fresh_inputs=false every call replays the first inputs.
class Workload {
  public:
    Workload(const SchemeEntry& entry, Operation op, std::uint64_t seed = 0,
             bool fresh_inputs = true);

    // Views stay valid until the next call.
    JobArgs next();

    const SchemeEntry& entry() const { return *entry_; }
    Operation operation() const { return op_; }

  private:
    void refill();

    const SchemeEntry* entry_;
    Operation op_;
    bool fresh_;
    bool primed_ = false;
    CtrDrbg rng_;
    Bytes pk_;
    Bytes sk_;
    Bytes a_;
    Bytes b_;
};

// n sequential jobs on one PE, preceded by one uncounted warmup iteration
// (skippable). A backend fault stops the run; the partial record is returned
// with valid=false and runs set to the completed count.
BenchRecord run_bench(Backend& backend, const PeDescriptor& pe, Workload& workload, int n = 1000,
                      bool warmup = true);

// Times direct engine calls with no device lifecycle; only the wait phase is
// populated.
BenchRecord run_software_baseline(const SchemeEntry& entry, Operation op, int n = 1000,
                                  std::uint64_t seed = 0, bool warmup = true);

struct CompareResult {
    double total_ratio = 0.0;
    double overhead_ratio = 0.0;       // (start + release) / baseline total
    bool overhead_dominated = false;   // overhead_ratio >= 1
};

// Caller pairs records of the same (scheme, operation). Baseline mean must be
// positive.
CompareResult compare(const BenchRecord& record, const BenchRecord& baseline);

}  // namespace pqeval
