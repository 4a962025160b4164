#include "pqeval/datasets.hpp"

#include <charconv>

#include "pqeval/keccak.hpp"

namespace pqeval {

namespace {

// Board characterization of the 24 shipped PE instances.
constexpr std::string_view kResourceCsv =
    "Algorithm,Platform,Security Level,Operation,PE Name,Functionality,Frequency [MHz],kLUTs,kFFs,BRAM,DSPs\n"
    "Kyber,VC709,1,Encapsulate,kyber2_enc,Working,265,63.329000,68.883000,29.500000,143.000000\n"
    "Kyber,VC709,1,Decapsulate,kyber2_dec,Working,280,44.488000,53.918000,27.500000,201.000000\n"
    "Kyber,VC709,3,Encapsulate,kyber3_enc,Working,275,55.982000,59.783000,28.500000,143.000000\n"
    "Kyber,VC709,3,Decapsulate,kyber3_dec,Working,274,36.704000,43.616000,26.500000,201.000000\n"
    "Kyber,VC709,5,Encapsulate,kyber4_enc,Working,262,56.166000,60.297000,28.500000,175.000000\n"
    "Kyber,VC709,5,Decapsulate,kyber4_dec,Working,250,37.864000,47.445000,26.500000,243.000000\n"
    "Kyber,AU280,1,Encapsulate,kyber2_enc,Working,440,64.900000,54.792000,28.500000,137.000000\n"
    "Kyber,AU280,1,Decapsulate,kyber2_dec,Working,450,45.038000,40.858000,26.500000,193.000000\n"
    "Kyber,AU280,3,Encapsulate,kyber3_enc,Working,450,57.164000,48.447000,27.000000,137.000000\n"
    "Kyber,AU280,3,Decapsulate,kyber3_dec,Working,450,37.307000,33.600000,25.000000,193.000000\n"
    "Kyber,AU280,5,Encapsulate,kyber4_enc,Working,440,57.745000,48.585000,27.000000,169.000000\n"
    "Kyber,AU280,5,Decapsulate,kyber4_dec,Working,430,39.127000,35.664000,24.500000,235.000000\n"
    "Dilithium,VC709,2,Sign,dilithium2_sign,Deadlock,177,81.877000,94.875000,29.500000,108.000000\n"
    "Dilithium,VC709,2,Verify,dilithium2_verify,Working,220,64.537000,72.207000,20.500000,59.000000\n"
    "Dilithium,VC709,3,Sign,dilithium3_sign,Working,209,82.336000,94.028000,40.000000,106.000000\n"
    "Dilithium,VC709,3,Verify,dilithium3_verify,Working,230,64.691000,72.448000,26.500000,57.000000\n"
    "Dilithium,VC709,5,Sign,dilithium5_sign,Working,190,86.601000,97.852000,45.500000,106.000000\n"
    "Dilithium,VC709,5,Verify,dilithium5_verify,Working,215,64.569000,72.445000,32.000000,57.000000\n"
    "Dilithium,AU280,2,Sign,dilithium2_sign,Deadlock,320,80.943000,77.604000,29.000000,108.000000\n"
    "Dilithium,AU280,2,Verify,dilithium2_verify,Working,300,62.922000,56.764000,20.000000,59.000000\n"
    "Dilithium,AU280,3,Sign,dilithium3_sign,Working,365,81.262000,75.504000,39.000000,106.000000\n"
    "Dilithium,AU280,3,Verify,dilithium3_verify,Working,300,63.204000,56.795000,25.500000,57.000000\n"
    "Dilithium,AU280,5,Sign,dilithium5_sign,Working,310,85.421000,79.031000,43.000000,106.000000\n"
    "Dilithium,AU280,5,Verify,dilithium5_verify,Working,300,62.857000,56.795000,29.500000,57.000000\n";

// Measured job-lifecycle phases per PE; the last column is the dataset's own
// mean duration and stays redundant with (start+wait+release)/1000.
constexpr std::string_view kTimingCsv =
    "Algorithm,Platform,Security Level,Operation,PE Name,Functionality,Frequency [MHz],PE Start [ns],PE Wait [ns],PE Release [ns],Mean Duration [us]\n"
    "Kyber,VC709,1,Encapsulate,kyber2_enc,Working,265,33879.021000,625722.209000,24261.589000,683.862819\n"
    "Kyber,VC709,1,Decapsulate,kyber2_dec,Working,280,38860.905000,927236.989000,17254.458000,983.352352\n"
    "Kyber,VC709,3,Encapsulate,kyber3_enc,Working,275,39136.417000,908713.685000,23993.971000,971.844073\n"
    "Kyber,VC709,3,Decapsulate,kyber3_dec,Working,274,36845.543000,1353062.283000,14922.066000,1404.829892\n"
    "Kyber,VC709,5,Encapsulate,kyber4_enc,Working,262,33415.510000,1300124.540000,21841.251000,1355.381301\n"
    "Kyber,VC709,5,Decapsulate,kyber4_dec,Working,250,40440.257000,2036665.064000,16949.798000,2094.055119\n"
    "Kyber,AU280,1,Encapsulate,kyber2_enc,Working,440,43271.507000,320968.749000,42768.400000,407.008656\n"
    "Kyber,AU280,1,Decapsulate,kyber2_dec,Working,450,38101.868000,505237.785000,19285.876000,562.625529\n"
    "Kyber,AU280,3,Encapsulate,kyber3_enc,Working,450,46614.493000,463630.703000,46358.170000,556.603366\n"
    "Kyber,AU280,3,Decapsulate,kyber3_dec,Working,450,44759.069000,717163.692000,20182.781000,782.105542\n"
    "Kyber,AU280,5,Encapsulate,kyber4_enc,Working,440,47224.161000,635546.020000,45309.562000,728.079743\n"
    "Kyber,AU280,5,Decapsulate,kyber4_dec,Working,430,46826.185000,1036884.439000,20067.314000,1103.777938\n"
    "Dilithium,VC709,2,Sign,dilithium2_sign,Deadlock,177,49764.787000,29582405.304000,43248.174000,29675.418265\n"
    "Dilithium,VC709,2,Verify,dilithium2_verify,Working,220,37304.096000,2728635.281000,29307.401000,2795.246778\n"
    "Dilithium,VC709,3,Sign,dilithium3_sign,Working,209,45576.437000,25517599.169000,38890.637000,25602.066243\n"
    "Dilithium,VC709,3,Verify,dilithium3_verify,Working,230,40676.377000,3705498.223000,27473.324000,3773.647924\n"
    "Dilithium,VC709,5,Sign,dilithium5_sign,Working,190,44947.777000,32771644.154000,42263.676000,32858.855607\n"
    "Dilithium,VC709,5,Verify,dilithium5_verify,Working,215,40420.255000,5532179.863000,27110.452000,5599.710570\n"
    "Dilithium,AU280,2,Sign,dilithium2_sign,Deadlock,320,56567.794000,23444002.396000,64092.834000,23564.663024\n"
    "Dilithium,AU280,2,Verify,dilithium2_verify,Working,300,50752.353000,1660295.248000,51009.036000,1762.056637\n"
    "Dilithium,AU280,3,Sign,dilithium3_sign,Working,365,55028.980000,12932134.169000,60011.130000,13047.174279\n"
    "Dilithium,AU280,3,Verify,dilithium3_verify,Working,300,52756.371000,2334493.162000,51142.836000,2438.392369\n"
    "Dilithium,AU280,5,Sign,dilithium5_sign,Working,310,57123.034000,17644266.313000,61795.863000,17763.185210\n"
    "Dilithium,AU280,5,Verify,dilithium5_verify,Working,300,52060.355000,3220930.649000,52414.143000,3325.405147\n";

constexpr std::string_view kResourceHeader =
    "Algorithm,Platform,Security Level,Operation,PE Name,Functionality,Frequency [MHz],kLUTs,kFFs,BRAM,DSPs";
constexpr std::string_view kTimingHeader =
    "Algorithm,Platform,Security Level,Operation,PE Name,Functionality,Frequency [MHz],PE Start [ns],PE Wait [ns],PE Release [ns],Mean Duration [us]";

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            return fields;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
    throw DataError("dataset row " + std::to_string(row) + ": " + what);
}

int parse_int(std::string_view s, std::size_t row, const char* what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) row_error(row, std::string("bad ") + what);
    return v;
}

double parse_double(std::string_view s, std::size_t row, const char* what) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) row_error(row, std::string("bad ") + what);
    return v;
}

Family parse_family(std::string_view s, std::size_t row) {
    if (s == "Kyber") return Family::kyber;
    if (s == "Dilithium") return Family::dilithium;
    row_error(row, "unknown algorithm '" + std::string(s) + "'");
}

Operation parse_operation(std::string_view s, std::size_t row) {
    if (s == "Encapsulate") return Operation::encapsulate;
    if (s == "Decapsulate") return Operation::decapsulate;
    if (s == "Sign") return Operation::sign;
    if (s == "Verify") return Operation::verify;
    row_error(row, "unknown operation '" + std::string(s) + "'");
}

Platform parse_platform(std::string_view s, std::size_t row) {
    auto p = platform_from_string(s);
    if (!p) row_error(row, "unknown platform '" + std::string(s) + "'");
    return *p;
}

PeHealth parse_health(std::string_view s, std::size_t row) {
    auto h = health_from_string(s);
    if (!h) row_error(row, "unknown functionality '" + std::string(s) + "'");
    return *h;
}

std::vector<std::vector<std::string_view>> parse_table(std::string_view text,
                                                       std::string_view header) {
    std::vector<std::string_view> lines = split_lines(text);
    if (lines.empty() || lines[0] != header) {
        throw DataError("unexpected dataset header");
    }
    std::vector<std::vector<std::string_view>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string_view> fields = split_fields(lines[i]);
        if (fields.size() != 11) row_error(i, "expected 11 columns");
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

std::string_view resource_dataset_csv() { return kResourceCsv; }
std::string_view timing_dataset_csv() { return kTimingCsv; }

const char* const kResourceDatasetSha3 =
    "EE937608BACBDA04C699C071DF37CEB2F4A3DC12AB33A72B21A128D3C1F2EE20";
const char* const kTimingDatasetSha3 =
    "74986091C5D3F6A7BF4492DCDFFC1640793C20C9FE8B424BFB825DE126A10C24";

void verify_dataset_pin(std::string_view text, std::string_view expected_sha3_hex) {
    Bytes digest = sha3_256(Bytes(text.begin(), text.end()));
    if (to_hex(digest) != expected_sha3_hex) {
        throw DataError("dataset does not match its pinned SHA3-256 digest");
    }
}

std::vector<ResourceRecord> parse_resource_csv(std::string_view text) {
    std::vector<ResourceRecord> records;
    std::size_t row_idx = 0;
    for (const auto& f : parse_table(text, kResourceHeader)) {
        ++row_idx;
        ResourceRecord rec;
        rec.family = parse_family(f[0], row_idx);
        rec.platform = parse_platform(f[1], row_idx);
        rec.security_level = parse_int(f[2], row_idx, "security level");
        rec.operation = parse_operation(f[3], row_idx);
        rec.pe_name = std::string(f[4]);
        rec.functionality = parse_health(f[5], row_idx);
        rec.freq_mhz = parse_int(f[6], row_idx, "frequency");
        rec.klut = parse_double(f[7], row_idx, "kLUTs");
        rec.kff = parse_double(f[8], row_idx, "kFFs");
        rec.bram = parse_double(f[9], row_idx, "BRAM");
        rec.dsp = parse_double(f[10], row_idx, "DSPs");
        if (rec.klut < 0 || rec.kff < 0 || rec.bram < 0 || rec.dsp < 0) {
            row_error(row_idx, "negative resource value");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<TimingRow> parse_timing_csv(std::string_view text) {
    std::vector<TimingRow> rows;
    std::size_t row_idx = 0;
    for (const auto& f : parse_table(text, kTimingHeader)) {
        ++row_idx;
        TimingRow row;
        (void)parse_family(f[0], row_idx);
        row.calibration.platform = parse_platform(f[1], row_idx);
        (void)parse_int(f[2], row_idx, "security level");
        (void)parse_operation(f[3], row_idx);
        row.calibration.pe_name = std::string(f[4]);
        (void)parse_health(f[5], row_idx);
        (void)parse_int(f[6], row_idx, "frequency");
        row.calibration.model.start_ns = parse_double(f[7], row_idx, "start");
        row.calibration.model.wait_ns = parse_double(f[8], row_idx, "wait");
        row.calibration.model.release_ns = parse_double(f[9], row_idx, "release");
        row.stated_mean_us = parse_double(f[10], row_idx, "mean duration");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CalibrationRow> calibration_rows(const std::vector<TimingRow>& rows) {
    std::vector<CalibrationRow> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.calibration);
    return out;
}

const std::vector<ResourceRecord>& shipped_resources() {
    static const std::vector<ResourceRecord> records = [] {
        verify_dataset_pin(kResourceCsv, kResourceDatasetSha3);
        auto recs = parse_resource_csv(kResourceCsv);
        if (recs.size() != 24) throw DataError("resource dataset must have 24 rows");
        return recs;
    }();
    return records;
}

const std::vector<TimingRow>& shipped_timing() {
    static const std::vector<TimingRow> rows = [] {
        verify_dataset_pin(kTimingCsv, kTimingDatasetSha3);
        auto parsed = parse_timing_csv(kTimingCsv);
        if (parsed.size() != 24) throw DataError("timing dataset must have 24 rows");
        return parsed;
    }();
    return rows;
}

std::vector<PeDescriptor> descriptors_from(const std::vector<ResourceRecord>& rows,
                                           std::optional<Platform> only) {
    std::vector<PeDescriptor> pes;
    for (const auto& rec : rows) {
        if (only && rec.platform != *only) continue;
        pes.push_back(PeDescriptor{rec.pe_name, rec.family, rec.security_level, rec.operation,
                                   rec.platform, rec.freq_mhz, rec.functionality});
    }
    return pes;
}

std::vector<PeDescriptor> shipped_pe_descriptors(Platform platform) {
    return descriptors_from(shipped_resources(), platform);
}

CalibrationMap shipped_calibration() { return load_calibration(calibration_rows(shipped_timing())); }

}  // namespace pqeval
