#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pqeval/bytes.hpp"
#include "pqeval/nist_api.hpp"

namespace pqeval {

enum class Platform { VC709, AU280 };

const char* platform_name(Platform p);
std::optional<Platform> platform_from_string(std::string_view s);

enum class PeHealth { Working, Deadlock };

const char* health_name(PeHealth h);
std::optional<PeHealth> health_from_string(std::string_view s);

// One processing element: a single (scheme, operation) kernel instance on a
// card. Kyber PE names carry the KYBER_K parameter (kyber2_enc is level 1),
// Dilithium PE names carry the mode.
struct PeDescriptor {
    std::string pe_name;
    Family family = Family::kyber;
    int nist_level = 0;
    Operation operation = Operation::encapsulate;
    Platform platform = Platform::VC709;
    int freq_mhz = 0;
    PeHealth functionality = PeHealth::Working;
};

// kyber{k}_{enc|dec} / dilithium{mode}_{sign|verify}. Throws
// std::invalid_argument for keypair (never a PE) or an unregistered combo.
std::string pe_name_for(Family family, int nist_level, Operation op);

// Per-job communication overhead phases, nanoseconds.
struct OverheadModel {
    double start_ns = 0.0;
    double wait_ns = 0.0;
    double release_ns = 0.0;
};

// (start + wait + release) / 1000
double modeled_mean_us(const OverheadModel& m);

struct JobTiming {
    double start_ns = 0.0;
    double wait_ns = 0.0;
    double release_ns = 0.0;
    double total_ns = 0.0;
};

struct CalibrationRow {
    std::string pe_name;
    Platform platform = Platform::VC709;
    OverheadModel model;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct JobTimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using CalibrationKey = std::pair<std::string, Platform>;
using CalibrationMap = std::map<CalibrationKey, OverheadModel>;

// Rejects duplicate (pe_name, platform) keys and negative phase values.
CalibrationMap load_calibration(const std::vector<CalibrationRow>& rows);

// Inputs of one job. a is the key argument (pk or sk), b the data argument
// (coins, ct, msg, or sm). Views must stay valid for the duration of the call.
struct JobArgs {
    ByteView a;
    ByteView b;
};

struct JobOutputs {
    Bytes out0;             // ct | ss | sm | msg
    Bytes out1;             // ss, KEM encapsulate only
    bool accepted = true;   // false: signature verify rejected
};

// Job lifecycle host. At most one in-flight job per PE; correctness is
// backend-invariant, only timing semantics differ.
class Backend {
  public:
    virtual ~Backend() = default;

    const std::vector<PeDescriptor>& pes() const { return pes_; }
    const PeDescriptor* find_pe(std::string_view pe_name) const;
    const PeDescriptor* find_pe(Family family, int nist_level, Operation op) const;

    // Throws NotFoundError when pe is not registered here, JobTimeoutError for
    // a simulated deadlock, std::invalid_argument for malformed args.
    std::pair<JobOutputs, JobTiming> run_job(const PeDescriptor& pe, const JobArgs& args);

    // Deadlock-flagged PEs run normally (with a one-time warning) unless a
    // timeout is set, in which case run_job on them times out after sleeping.
    void set_simulate_deadlock(std::optional<int> timeout_ms) { simulate_deadlock_ms_ = timeout_ms; }
    std::optional<int> simulate_deadlock() const { return simulate_deadlock_ms_; }

  protected:
    explicit Backend(std::vector<PeDescriptor> pes) : pes_(std::move(pes)) {}
    virtual std::pair<JobOutputs, JobTiming> run_job_impl(const PeDescriptor& pe, const JobArgs& args) = 0;

    std::vector<PeDescriptor> pes_;
    std::optional<int> simulate_deadlock_ms_;
    bool warned_deadlock_ = false;
};

// Executes the engines on the host and measures the three phases with a
// monotonic clock (start: argument marshalling, wait: compute, release:
// result unmarshalling). Timer overhead is calibrated once and subtracted.
class SoftwareBackend : public Backend {
  public:
    explicit SoftwareBackend(std::vector<PeDescriptor> pes);
    // All registered (family, level, apply/verify) combos, platform tag only.
    static SoftwareBackend with_all_pes(Platform platform = Platform::VC709);

  protected:
    std::pair<JobOutputs, JobTiming> run_job_impl(const PeDescriptor& pe, const JobArgs& args) override;
};

// Delegates compute to the engines for correctness and reports JobTiming
// copied from the calibration table; host wall time is never reported.
class ModeledBackend : public Backend {
  public:
    // Throws DataError when a registered PE has no calibration entry.
    ModeledBackend(std::vector<PeDescriptor> pes, CalibrationMap calibration);

  protected:
    std::pair<JobOutputs, JobTiming> run_job_impl(const PeDescriptor& pe, const JobArgs& args) override;

  private:
    CalibrationMap calibration_;
};

// Calibrated cost of two adjacent monotonic-clock reads, nanoseconds.
double timer_overhead_ns();

}  // namespace pqeval
