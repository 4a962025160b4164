#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pqeval/datasets.hpp"
#include "pqeval/kat.hpp"

using namespace pqeval;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "pqeval_cli_work";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// prefix lands before the binary: env assignments or `cd dir &&`.
RunResult run_cli(const std::string& args, const std::string& prefix = "") {
    static int counter = 0;
    fs::path out = work_dir() / ("stdout_" + std::to_string(counter));
    fs::path err = work_dir() / ("stderr_" + std::to_string(counter));
    ++counter;
    std::string cmd = prefix + "\"" + PQEVAL_CLI_PATH + std::string("\" ") + args + " > \"" +
                      out.string() + "\" 2> \"" + err.string() + "\"";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string source_dir() {
    const char* dir = std::getenv("PQEVAL_SOURCE_DIR");
    REQUIRE(dir != nullptr);
    return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

Bytes counting_entropy() {
    Bytes e(48);
    for (int i = 0; i < 48; ++i) e[static_cast<size_t>(i)] = static_cast<uint8_t>(i);
    return e;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

}  // namespace

TEST_CASE("help lists the registered schemes") {
    RunResult r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "kat-gen"));
    CHECK(contains(r.out, "kat-verify"));
    CHECK(contains(r.out, "bench"));
    CHECK(contains(r.out, "report"));
    CHECK(contains(r.out, "emit-kernel-descriptor"));
    CHECK(contains(r.out, "--family kyber --level 1  (Kyber512)"));
    CHECK(contains(r.out, "--family kyber --level 3  (Kyber768)"));
    CHECK(contains(r.out, "--family kyber --level 5  (Kyber1024)"));
    CHECK(contains(r.out, "--family dilithium --level 2  (Dilithium2)"));
    CHECK(contains(r.out, "--family dilithium --level 3  (Dilithium3)"));
    CHECK(contains(r.out, "--family dilithium --level 5  (Dilithium5)"));
}

TEST_CASE("a subcommand is required") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("kat-gen reproduces the held-out fixture") {
    fs::path out = work_dir() / "kyber1_gen.rsp";
    RunResult r = run_cli("kat-gen -f kyber -l 1 -n 3 -o " + q(out));
    CHECK(r.code == 0);
    CHECK(contains(r.out, "wrote "));
    CHECK(contains(r.out, "(3 cases, Kyber512)"));
    CHECK(slurp(out) == slurp(source_dir() + "/tests/data/PQCkemKAT_1632.first3.rsp"));
}

TEST_CASE("kat-gen derives the NIST file name from the secret key length") {
    fs::path dir = work_dir() / "defaultname";
    fs::create_directories(dir);
    RunResult r = run_cli("kat-gen -f dilithium -l 2 -n 1", "cd " + q(dir) + " && ");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "PQCsignKAT_2528.rsp"));
    CHECK(fs::exists(dir / "PQCsignKAT_2528.rsp"));
}

TEST_CASE("kat-gen argument validation") {
    CHECK(run_cli("kat-gen -f kyber -l 1 -n 0").code == 2);
    CHECK(run_cli("kat-gen -f rsa -l 1 -n 1").code == 2);
    CHECK(run_cli("kat-gen -f kyber -l 2 -n 1").code == 2);
    CHECK(run_cli("kat-gen -l 1 -n 1").code == 2);  // --family is required
    RunResult bad_entropy = run_cli("kat-gen -f kyber -l 1 -n 1 --entropy ABCD");
    CHECK(bad_entropy.code == 2);
    CHECK(contains(bad_entropy.err, "96 hex digits"));
    CHECK(run_cli("kat-gen -f kyber -l 1 -n 1 --entropy " + std::string(96, 'G')).code == 2);
}

TEST_CASE("kat-gen honors explicit entropy") {
    fs::path out = work_dir() / "custom_entropy.rsp";
    std::string zeros(96, '0');
    RunResult r = run_cli("kat-gen -f kyber -l 1 -n 1 --entropy " + zeros + " -o " + q(out));
    CHECK(r.code == 0);
    KatFile file = parse_rsp(slurp(out));
    REQUIRE(file.kem_cases.size() == 1);
    KatFile reference = generate_kat(*registry_lookup(Family::kyber, 1), 1, Bytes(48, 0));
    CHECK(file.kem_cases[0].seed == reference.kem_cases[0].seed);
    CHECK(file.kem_cases[0].ct == reference.kem_cases[0].ct);
}

TEST_CASE("kat-verify passes a clean file and reports totals") {
    fs::path rsp = work_dir() / "verify_clean.rsp";
    RunResult gen = run_cli("kat-gen -f kyber -l 1 -n 3 -o " + q(rsp));
    REQUIRE(gen.code == 0);
    RunResult r = run_cli("kat-verify " + q(rsp) + " -f kyber -l 1");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "Kyber512: 3/3 cases passed (software backend)"));
    CHECK_FALSE(contains(r.out, "FAIL"));
}

TEST_CASE("kat-verify fails on a corrupted case and names the field") {
    KatFile file = generate_kat(*registry_lookup(Family::kyber, 1), 3, counting_entropy());
    file.kem_cases[1].ss[4] ^= 0x01;
    fs::path rsp = work_dir() / "verify_corrupt.rsp";
    write_text(rsp, write_rsp(file));

    RunResult r = run_cli("kat-verify " + q(rsp) + " -f kyber -l 1");
    CHECK(r.code == 1);
    CHECK(contains(r.out, "case 1: FAIL (ss)"));
    CHECK(contains(r.out, "Kyber512: 2/3 cases passed (software backend)"));
}

TEST_CASE("kat-verify writes a JSON report with modeled timing") {
    fs::path rsp = work_dir() / "verify_modeled.rsp";
    fs::path json_path = work_dir() / "verify_modeled.json";
    RunResult gen = run_cli("kat-gen -f kyber -l 1 -n 2 -o " + q(rsp));
    REQUIRE(gen.code == 0);
    RunResult r = run_cli("kat-verify " + q(rsp) + " -f kyber -l 1 -b modeled -p VC709 --json " +
                          q(json_path));
    CHECK(r.code == 0);
    CHECK(contains(r.out, "Kyber512: 2/2 cases passed (modeled backend)"));

    auto doc = nlohmann::json::parse(slurp(json_path));
    CHECK(doc["scheme"] == "Kyber512");
    CHECK(doc["backend"] == "modeled");
    CHECK(doc["platform"] == "VC709");
    CHECK(doc["total"] == 2);
    CHECK(doc["passed"] == 2);
    REQUIRE(doc["cases"].size() == 2);
    CHECK(doc["cases"][0]["pass"] == true);
    CHECK(doc["modeled_timing"]["encapsulate"]["pe"] == "kyber2_enc");
    CHECK(doc["modeled_timing"]["encapsulate"]["mean_us"].get<double>() ==
          doctest::Approx(683.862819).epsilon(1e-9));
    CHECK(doc["modeled_timing"]["decapsulate"]["mean_us"].get<double>() ==
          doctest::Approx(983.352352).epsilon(1e-9));
}

TEST_CASE("kat-verify IO and type errors") {
    CHECK(run_cli("kat-verify /nonexistent.rsp -f kyber -l 1").code == 3);

    fs::path bad = work_dir() / "malformed.rsp";
    write_text(bad, "# T\n\ncount = 0\nseed = ZZ\n");
    RunResult r = run_cli("kat-verify " + q(bad) + " -f kyber -l 1");
    CHECK(r.code == 3);
    CHECK(contains(r.err, "parse error: line 4"));

    fs::path kem = work_dir() / "type_mismatch.rsp";
    RunResult gen = run_cli("kat-gen -f kyber -l 1 -n 1 -o " + q(kem));
    REQUIRE(gen.code == 0);
    CHECK(run_cli("kat-verify " + q(kem) + " -f dilithium -l 2").code == 2);
}

TEST_CASE("simulated deadlock turns cases into faults") {
    fs::path rsp = work_dir() / "deadlock.rsp";
    RunResult gen = run_cli("kat-gen -f dilithium -l 2 -n 2 -o " + q(rsp));
    REQUIRE(gen.code == 0);
    RunResult r = run_cli("kat-verify " + q(rsp) +
                          " -f dilithium -l 2 -b modeled --simulate-deadlock 5");
    CHECK(r.code == 1);
    CHECK(contains(r.out, "FAIL (fault: job on dilithium2_sign timed out after 5 ms)"));
    CHECK(contains(r.out, "Dilithium2: 0/2 cases passed (modeled backend)"));
}

TEST_CASE("bench on the calibrated backend prints the table numbers") {
    RunResult r = run_cli("bench -f kyber -l 1 --operation encapsulate -b modeled -n 5");
    CHECK(r.code == 0);
    CHECK(contains(r.out,
                   "ID,Runs,Mean Duration [us],Mean Start [ns],Mean Wait [ns],"
                   "Mean Release [ns],Stddev [us],Valid"));
    CHECK(contains(r.out, "kyber2_enc/VC709,5,683.862819,33879.021000,625722.209000,"
                          "24261.589000,0.000000,true"));

    RunResult au = run_cli("bench -f kyber -l 1 --operation encapsulate -b modeled -p AU280 -n 2");
    CHECK(au.code == 0);
    CHECK(contains(au.out, "kyber2_enc/AU280,2,407.008656"));
}

TEST_CASE("bench with the host baseline emits comparison columns") {
    RunResult r = run_cli(
        "bench -f kyber -l 1 --operation encapsulate -b modeled -n 3 --baseline");
    CHECK(r.code == 0);
    CHECK(contains(r.out, ",Baseline ID,Baseline Mean [us],Total Ratio,Overhead Ratio,"
                          "Overhead Dominated"));
    CHECK(contains(r.out, "software/Kyber512/encapsulate"));
}

TEST_CASE("bench writes CSV to a file on request") {
    fs::path out = work_dir() / "bench.csv";
    RunResult r = run_cli("bench -f dilithium -l 3 --operation verify -b modeled -n 2 -o " +
                          q(out));
    CHECK(r.code == 0);
    CHECK(contains(r.out, "wrote "));
    CHECK(contains(slurp(out), "dilithium3_verify/VC709,2,3773.647924"));
}

TEST_CASE("bench on a deadlocked PE yields an invalid partial record") {
    RunResult r = run_cli(
        "bench -f dilithium -l 2 --operation sign -b modeled -n 3 --simulate-deadlock 5");
    CHECK(r.code == 1);
    CHECK(contains(r.out, "dilithium2_sign/VC709,0,"));
    CHECK(contains(r.out, ",false"));
}

TEST_CASE("bench argument validation") {
    CHECK(run_cli("bench -f kyber -l 1 --operation sign -b modeled -n 1").code == 2);
    CHECK(run_cli("bench -f kyber -l 1 --operation encapsulate -n 0").code == 2);
    CHECK(run_cli("bench -f kyber -l 1 --operation encapsulate -b quantum -n 1").code == 2);
    CHECK(run_cli("bench -f kyber -l 1 --operation encapsulate -p X99 -n 1").code == 2);
    CHECK(run_cli("bench -f kyber -l 1 -n 1").code == 2);  // --operation is required
}

TEST_CASE("software bench measures real work") {
    RunResult r = run_cli("bench -f kyber -l 1 --operation decapsulate -b software -n 3");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "kyber2_dec/VC709,3,"));
    CHECK(contains(r.out, ",true"));
}

TEST_CASE("report emits the figure files") {
    fs::path dir = work_dir() / "report_fig1";
    RunResult r = run_cli("report -k fig1 -o " + q(dir));
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "fig1.csv"));
    CHECK(fs::exists(dir / "fig1.json"));
    std::string csv = slurp(dir / "fig1.csv");
    CHECK(contains(csv, "PE Name,VC709 Total,AU280 Total"));
    CHECK(contains(csv, "kyber2_enc,305,285,304.712000,285.192000,265,440"));

    fs::path all_dir = work_dir() / "report_all";
    RunResult all = run_cli("report -k all -n 2 -o " + q(all_dir));
    CHECK(all.code == 0);
    for (const char* name : {"fig1.csv", "fig1.json", "fig4.csv", "fig4.json", "fig6.csv",
                             "fig6.json"}) {
        CHECK(fs::exists(all_dir / name));
    }
    auto fig4 = nlohmann::json::parse(slurp(all_dir / "fig4.json"));
    CHECK(fig4["series"].size() == 24);
    auto fig6 = nlohmann::json::parse(slurp(all_dir / "fig6.json"));
    CHECK(fig6["series"].size() == 24);
    // Every calibrated record replays its table mean.
    for (const auto& row : fig4["series"]) {
        CHECK(row["runs"] == 3);
    }

    CHECK(run_cli("report -k fig9 -o " + q(dir)).code == 2);
    CHECK(run_cli("report -k fig1 -n 0 -o " + q(dir)).code == 2);
}

TEST_CASE("kernel descriptors carry name, id, and compiler flags") {
    RunResult r = run_cli("emit-kernel-descriptor -f kyber -l 1 --operation encapsulate");
    CHECK(r.code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["name"] == "kyber2_enc");
    CHECK(doc["description"] ==
          "Kyber512 encapsulate processing element behind the standard KEM/signature API");
    CHECK(doc["id"] == 1);
    CHECK(doc["CompilerFlags"] == "-DKYBER_K=2");

    auto dec = nlohmann::json::parse(
        run_cli("emit-kernel-descriptor -f kyber -l 3 --operation decapsulate").out);
    CHECK(dec["name"] == "kyber3_dec");
    CHECK(dec["id"] == 4);
    CHECK(dec["CompilerFlags"] == "-DKYBER_K=3");

    auto sig = nlohmann::json::parse(
        run_cli("emit-kernel-descriptor -f dilithium -l 5 --operation verify").out);
    CHECK(sig["name"] == "dilithium5_verify");
    CHECK(sig["id"] == 12);
    CHECK(sig["CompilerFlags"] == "-DDILITHIUM_MODE=5");

    fs::path out = work_dir() / "kernel.json";
    RunResult to_file = run_cli("emit-kernel-descriptor -f dilithium -l 2 --operation sign -o " +
                                q(out));
    CHECK(to_file.code == 0);
    CHECK(nlohmann::json::parse(slurp(out))["id"] == 7);

    CHECK(run_cli("emit-kernel-descriptor -f kyber -l 1 --operation keypair").code == 2);
}

TEST_CASE("calibration overrides follow the documented precedence") {
    // A tampered timing table (kyber2_enc/VC709 start +1000 ns).
    std::string modified(timing_dataset_csv());
    size_t pos = modified.find("33879.021000");
    REQUIRE(pos != std::string::npos);
    modified.replace(pos, 12, "34879.021000");
    fs::path mod_csv = work_dir() / "mod_timing.csv";
    write_text(mod_csv, modified);

    std::string env_prefix = "PQEVAL_CALIBRATION=" + q(mod_csv) + " ";
    RunResult env_run =
        run_cli("bench -f kyber -l 1 --operation encapsulate -b modeled -n 2", env_prefix);
    CHECK(env_run.code == 0);
    CHECK(contains(env_run.out, "684.862819"));
    CHECK(contains(env_run.out, "34879.021000"));

    // An explicit --calibration flag beats the environment.
    fs::path orig_csv = fs::path(source_dir()) / "data" / "pe_timing.csv";
    RunResult flag_run = run_cli("bench -f kyber -l 1 --operation encapsulate -b modeled -n 2 "
                                 "--calibration " +
                                     q(orig_csv),
                                 env_prefix);
    CHECK(flag_run.code == 0);
    CHECK(contains(flag_run.out, "683.862819"));

    CHECK(run_cli("bench -f kyber -l 1 --operation encapsulate -b modeled -n 1 "
                  "--calibration /nonexistent.csv")
              .code == 3);
}
