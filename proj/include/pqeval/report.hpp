#pragma once

#include <map>
#include <string>
#include <vector>

#include "pqeval/bench.hpp"
#include "pqeval/device.hpp"

namespace pqeval {

// One row of the design-frequency/resource table; kLUT and kFF are in
// thousands, BRAM and DSP in units.
struct ResourceRecord {
    std::string pe_name;
    Family family = Family::kyber;
    Platform platform = Platform::VC709;
    int security_level = 0;
    Operation operation = Operation::encapsulate;
    PeHealth functionality = PeHealth::Working;
    int freq_mhz = 0;
    double klut = 0.0;
    double kff = 0.0;
    double bram = 0.0;
    double dsp = 0.0;
};

// klut + kff + bram + dsp; rounding happens only at display time.
double resource_total(const ResourceRecord& rec);

// Half-up display rounding for total labels.
long rounded_total(double value);

// resource_total(rec) * mean_us, an area-time product stand-in. mean_us must
// be positive.
double area_time(const ResourceRecord& rec, double mean_us);

// Geometric mean of per-PE frequency ratios numer/denom, grouped by family.
// Rows are matched by pe_name; mismatched sets are a DataError.
std::map<Family, double> frequency_ratio(const std::vector<ResourceRecord>& numer,
                                         const std::vector<ResourceRecord>& denom);

struct BenchPair {
    BenchRecord pe;
    BenchRecord baseline;
};

enum class ReportKind { fig1, fig4, fig6 };

// Figure-data emission: CSV plus a JSON mirror per kind, byte-deterministic
// for identical inputs. Returns the paths written (csv, json).
std::vector<std::string> emit_fig1(const std::vector<ResourceRecord>& records,
                                   const std::string& out_dir);
std::vector<std::string> emit_fig4(const std::vector<BenchPair>& rows, const std::string& out_dir);
std::vector<std::string> emit_fig6(const std::vector<BenchPair>& rows, const std::string& out_dir);

struct ReportInputs {
    std::vector<ResourceRecord> resources;
    std::vector<BenchPair> bench;
};

std::vector<std::string> emit(ReportKind kind, const ReportInputs& inputs,
                              const std::string& out_dir);

}  // namespace pqeval
