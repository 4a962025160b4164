#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pqeval/device.hpp"
#include "pqeval/report.hpp"

namespace pqeval {

// Embedded characterization datasets: per-PE design frequency plus resource
// utilization, and per-PE communication-overhead phases plus mean duration.
// Copies of the same text ship in data/ for external tooling.
std::string_view resource_dataset_csv();
std::string_view timing_dataset_csv();

// SHA3-256 pins of the embedded text, uppercase hex.
extern const char* const kResourceDatasetSha3;
extern const char* const kTimingDatasetSha3;

// DataError when the text does not hash to the pin.
void verify_dataset_pin(std::string_view text, std::string_view expected_sha3_hex);

// Strict CSV loaders: exact headers, 11 columns, DataError with row context.
std::vector<ResourceRecord> parse_resource_csv(std::string_view text);

struct TimingRow {
    CalibrationRow calibration;
    double stated_mean_us = 0.0;  // the dataset's own mean-duration column
};

std::vector<TimingRow> parse_timing_csv(std::string_view text);
std::vector<CalibrationRow> calibration_rows(const std::vector<TimingRow>& rows);

// Pin-verified embedded datasets; both carry exactly 24 rows.
const std::vector<ResourceRecord>& shipped_resources();
const std::vector<TimingRow>& shipped_timing();

std::vector<PeDescriptor> descriptors_from(const std::vector<ResourceRecord>& rows,
                                           std::optional<Platform> only = std::nullopt);
std::vector<PeDescriptor> shipped_pe_descriptors(Platform platform);
CalibrationMap shipped_calibration();

}  // namespace pqeval
