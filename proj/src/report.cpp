#include "pqeval/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace pqeval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

struct Fig1Row {
    std::string pe_name;
    const ResourceRecord* vc709 = nullptr;
    const ResourceRecord* au280 = nullptr;
};

std::vector<Fig1Row> pair_by_pe(const std::vector<ResourceRecord>& records) {
    std::vector<Fig1Row> rows;
    for (const auto& rec : records) {
        Fig1Row* row = nullptr;
        for (auto& r : rows) {
            if (r.pe_name == rec.pe_name) {
                row = &r;
                break;
            }
        }
        if (row == nullptr) {
            rows.push_back(Fig1Row{rec.pe_name, nullptr, nullptr});
            row = &rows.back();
        }
        (rec.platform == Platform::VC709 ? row->vc709 : row->au280) = &rec;
    }
    return rows;
}

}  // namespace

double resource_total(const ResourceRecord& rec) {
    return rec.klut + rec.kff + rec.bram + rec.dsp;
}

long rounded_total(double value) { return static_cast<long>(std::floor(value + 0.5)); }

double area_time(const ResourceRecord& rec, double mean_us) {
    if (mean_us <= 0) {
        throw std::invalid_argument("mean_us must be positive");
    }
    return resource_total(rec) * mean_us;
}

std::map<Family, double> frequency_ratio(const std::vector<ResourceRecord>& numer,
                                         const std::vector<ResourceRecord>& denom) {
    if (numer.size() != denom.size()) {
        throw DataError("mismatched PE sets");
    }
    std::map<Family, std::pair<double, int>> log_sums;
    for (const auto& n : numer) {
        const ResourceRecord* d = nullptr;
        for (const auto& cand : denom) {
            if (cand.pe_name == n.pe_name) {
                d = &cand;
                break;
            }
        }
        if (d == nullptr) {
            throw DataError("no matching row for " + n.pe_name);
        }
        if (n.freq_mhz <= 0 || d->freq_mhz <= 0) {
            throw DataError("non-positive frequency for " + n.pe_name);
        }
        auto& [sum, count] = log_sums[n.family];
        sum += std::log(static_cast<double>(n.freq_mhz) / d->freq_mhz);
        ++count;
    }
    std::map<Family, double> ratios;
    for (const auto& [family, acc] : log_sums) {
        ratios[family] = std::exp(acc.first / acc.second);
    }
    return ratios;
}

std::vector<std::string> emit_fig1(const std::vector<ResourceRecord>& records,
                                   const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<Fig1Row> rows = pair_by_pe(records);

    std::string csv =
        "PE Name,VC709 Total,AU280 Total,VC709 Total (raw),AU280 Total (raw),"
        "VC709 Frequency [MHz],AU280 Frequency [MHz]\n";
    ordered_json series = ordered_json::array();
    for (const auto& row : rows) {
        csv += row.pe_name;
        csv += row.vc709 ? "," + std::to_string(rounded_total(resource_total(*row.vc709))) : ",";
        csv += row.au280 ? "," + std::to_string(rounded_total(resource_total(*row.au280))) : ",";
        csv += row.vc709 ? "," + fmt6(resource_total(*row.vc709)) : ",";
        csv += row.au280 ? "," + fmt6(resource_total(*row.au280)) : ",";
        csv += row.vc709 ? "," + std::to_string(row.vc709->freq_mhz) : ",";
        csv += row.au280 ? "," + std::to_string(row.au280->freq_mhz) : ",";
        csv += '\n';

        ordered_json entry;
        entry["pe_name"] = row.pe_name;
        for (const auto& [key, rec] : {std::pair{"VC709", row.vc709}, {"AU280", row.au280}}) {
            if (rec == nullptr) continue;
            entry[key] = {{"total", rounded_total(resource_total(*rec))},
                          {"total_raw", resource_total(*rec)},
                          {"freq_mhz", rec->freq_mhz}};
        }
        series.push_back(std::move(entry));
    }
    ordered_json doc;
    doc["figure"] = "fig1";
    doc["series"] = std::move(series);

    auto csv_path = std::filesystem::path(out_dir) / "fig1.csv";
    auto json_path = std::filesystem::path(out_dir) / "fig1.json";
    write_file(csv_path, csv);
    write_file(json_path, doc.dump(2) + "\n");
    return {csv_path.string(), json_path.string()};
}

std::vector<std::string> emit_fig4(const std::vector<BenchPair>& rows, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::string csv = "ID,Baseline ID,Runs,Mean Duration [us],Baseline Mean Duration [us],Ratio\n";
    ordered_json series = ordered_json::array();
    for (const auto& row : rows) {
        CompareResult cmp = compare(row.pe, row.baseline);
        csv += row.pe.id + "," + row.baseline.id + "," + std::to_string(row.pe.runs) + "," +
               fmt6(row.pe.mean_total_us) + "," + fmt6(row.baseline.mean_total_us) + "," +
               fmt6(cmp.total_ratio) + "\n";
        series.push_back({{"id", row.pe.id},
                          {"baseline_id", row.baseline.id},
                          {"runs", row.pe.runs},
                          {"mean_total_us", row.pe.mean_total_us},
                          {"baseline_mean_total_us", row.baseline.mean_total_us},
                          {"ratio", cmp.total_ratio}});
    }
    ordered_json doc;
    doc["figure"] = "fig4";
    doc["log_scale"] = true;
    doc["series"] = std::move(series);

    auto csv_path = std::filesystem::path(out_dir) / "fig4.csv";
    auto json_path = std::filesystem::path(out_dir) / "fig4.json";
    write_file(csv_path, csv);
    write_file(json_path, doc.dump(2) + "\n");
    return {csv_path.string(), json_path.string()};
}

std::vector<std::string> emit_fig6(const std::vector<BenchPair>& rows, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::string csv =
        "ID,Baseline ID,PE Start [ns],PE Release [ns],Overhead [ns],Baseline Total [ns],"
        "Overhead Ratio,Overhead Dominated\n";
    ordered_json series = ordered_json::array();
    for (const auto& row : rows) {
        CompareResult cmp = compare(row.pe, row.baseline);
        double overhead_ns = row.pe.mean_start_ns + row.pe.mean_release_ns;
        double baseline_ns = row.baseline.mean_total_us * 1000.0;
        csv += row.pe.id + "," + row.baseline.id + "," + fmt6(row.pe.mean_start_ns) + "," +
               fmt6(row.pe.mean_release_ns) + "," + fmt6(overhead_ns) + "," + fmt6(baseline_ns) +
               "," + fmt6(cmp.overhead_ratio) + "," +
               (cmp.overhead_dominated ? "true" : "false") + "\n";
        series.push_back({{"id", row.pe.id},
                          {"baseline_id", row.baseline.id},
                          {"start_ns", row.pe.mean_start_ns},
                          {"release_ns", row.pe.mean_release_ns},
                          {"overhead_ns", overhead_ns},
                          {"baseline_total_ns", baseline_ns},
                          {"overhead_ratio", cmp.overhead_ratio},
                          {"overhead_dominated", cmp.overhead_dominated}});
    }
    ordered_json doc;
    doc["figure"] = "fig6";
    doc["stacked"] = {"start_ns", "release_ns"};
    doc["series"] = std::move(series);

    auto csv_path = std::filesystem::path(out_dir) / "fig6.csv";
    auto json_path = std::filesystem::path(out_dir) / "fig6.json";
    write_file(csv_path, csv);
    write_file(json_path, doc.dump(2) + "\n");
    return {csv_path.string(), json_path.string()};
}

std::vector<std::string> emit(ReportKind kind, const ReportInputs& inputs,
                              const std::string& out_dir) {
    switch (kind) {
        case ReportKind::fig1:
            return emit_fig1(inputs.resources, out_dir);
        case ReportKind::fig4:
            return emit_fig4(inputs.bench, out_dir);
        case ReportKind::fig6:
            return emit_fig6(inputs.bench, out_dir);
    }
    throw std::invalid_argument("unknown report kind");
}

}  // namespace pqeval
