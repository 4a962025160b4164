#include "pqeval/kat.hpp"

#include <charconv>

#include "pqeval/drbg.hpp"

namespace pqeval {

namespace {

struct Line {
    int number = 0;  // 1-based
    std::string_view key;
    std::string_view value;
};

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits into header + `key = value` lines, dropping blanks.
struct RspLines {
    std::string header;
    std::vector<Line> fields;
};

RspLines tokenize(std::string_view text) {
    RspLines out;
    bool have_header = false;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++number;
        std::string_view line = strip(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (!have_header) {
                out.header = std::string(strip(line.substr(1)));
                have_header = true;
            }
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw KatParseError(number, "expected `name = value`");
        }
        Line l;
        l.number = number;
        l.key = strip(line.substr(0, eq));
        l.value = strip(line.substr(eq + 1));
        if (l.key.empty()) {
            throw KatParseError(number, "empty field name");
        }
        out.fields.push_back(l);
    }
    return out;
}

class FieldReader {
  public:
    explicit FieldReader(const std::vector<Line>& fields) : fields_(fields) {}

    bool done() const { return idx_ >= fields_.size(); }
    const Line& peek() const { return fields_[idx_]; }
    int last_line() const { return fields_.empty() ? 1 : fields_.back().number; }

    const Line& expect(std::string_view key) {
        if (done()) {
            throw KatParseError(last_line(), std::string("missing field `") + std::string(key) + "`");
        }
        const Line& l = fields_[idx_];
        if (l.key != key) {
            throw KatParseError(l.number, std::string("expected field `") + std::string(key) +
                                              "`, found `" + std::string(l.key) + "`");
        }
        ++idx_;
        return l;
    }

    Bytes expect_hex(std::string_view key) {
        const Line& l = expect(key);
        try {
            return from_hex(l.value);
        } catch (const std::invalid_argument& e) {
            throw KatParseError(l.number, std::string("bad hex in `") + std::string(key) + "`: " + e.what());
        }
    }

    long expect_int(std::string_view key) {
        const Line& l = expect(key);
        long v = 0;
        auto [ptr, ec] = std::from_chars(l.value.data(), l.value.data() + l.value.size(), v);
        if (ec != std::errc{} || ptr != l.value.data() + l.value.size()) {
            throw KatParseError(l.number, std::string("bad integer in `") + std::string(key) + "`");
        }
        return v;
    }

  private:
    const std::vector<Line>& fields_;
    std::size_t idx_ = 0;
};

void append_hex_field(std::string& out, const char* key, ByteView value) {
    out += key;
    out += " = ";
    out += to_hex(value);
    out += '\n';
}

}  // namespace

KatFile parse_rsp(std::string_view text) {
    RspLines lines = tokenize(text);
    KatFile file;
    file.header = lines.header;

    FieldReader reader(lines.fields);
    bool first = true;
    int expected_count = 0;
    while (!reader.done()) {
        int count_line = reader.peek().number;
        long count = reader.expect_int("count");
        if (count != expected_count) {
            throw KatParseError(count_line, "non-consecutive count " + std::to_string(count) +
                                                ", expected " + std::to_string(expected_count));
        }
        ++expected_count;
        Bytes seed = reader.expect_hex("seed");
        bool sign_case = !reader.done() && reader.peek().key == "mlen";
        if (first) {
            file.is_kem = !sign_case;
            first = false;
        } else if (file.is_kem == sign_case) {
            throw KatParseError(reader.done() ? reader.last_line() : reader.peek().number,
                                "mixed KEM and signature cases");
        }
        if (sign_case) {
            KatSignCase c;
            c.count = static_cast<int>(count);
            c.seed = std::move(seed);
            int mlen_line = reader.peek().number;
            c.mlen = static_cast<std::size_t>(reader.expect_int("mlen"));
            c.msg = reader.expect_hex("msg");
            if (c.msg.size() != c.mlen) {
                throw KatParseError(mlen_line, "msg length does not match mlen");
            }
            c.pk = reader.expect_hex("pk");
            c.sk = reader.expect_hex("sk");
            int smlen_line = reader.done() ? reader.last_line() : reader.peek().number;
            c.smlen = static_cast<std::size_t>(reader.expect_int("smlen"));
            c.sm = reader.expect_hex("sm");
            if (c.sm.size() != c.smlen) {
                throw KatParseError(smlen_line, "sm length does not match smlen");
            }
            file.sign_cases.push_back(std::move(c));
        } else {
            KatKemCase c;
            c.count = static_cast<int>(count);
            c.seed = std::move(seed);
            c.pk = reader.expect_hex("pk");
            c.sk = reader.expect_hex("sk");
            c.ct = reader.expect_hex("ct");
            c.ss = reader.expect_hex("ss");
            file.kem_cases.push_back(std::move(c));
        }
    }
    return file;
}

std::string write_rsp(const KatFile& file) {
    std::string out = "# " + file.header + "\n\n";
    if (file.is_kem) {
        for (const auto& c : file.kem_cases) {
            out += "count = " + std::to_string(c.count) + "\n";
            append_hex_field(out, "seed", c.seed);
            append_hex_field(out, "pk", c.pk);
            append_hex_field(out, "sk", c.sk);
            append_hex_field(out, "ct", c.ct);
            append_hex_field(out, "ss", c.ss);
            out += '\n';
        }
    } else {
        for (const auto& c : file.sign_cases) {
            out += "count = " + std::to_string(c.count) + "\n";
            append_hex_field(out, "seed", c.seed);
            out += "mlen = " + std::to_string(c.mlen) + "\n";
            append_hex_field(out, "msg", c.msg);
            append_hex_field(out, "pk", c.pk);
            append_hex_field(out, "sk", c.sk);
            out += "smlen = " + std::to_string(c.smlen) + "\n";
            append_hex_field(out, "sm", c.sm);
            out += '\n';
        }
    }
    return out;
}

KatFile generate_kat(const SchemeEntry& entry, int n, ByteView master_entropy) {
    if (master_entropy.size() != 48) {
        throw std::invalid_argument("master entropy must be 48 bytes");
    }
    if (n < 0) {
        throw std::invalid_argument("case count must be non-negative");
    }
    KatFile file;
    file.header = entry.name;
    file.is_kem = entry.is_kem;

    // The master stream yields seed_i (and, for signatures, msg_i right after
    // seed_i); the per-case DRBG is then re-seeded before any engine call.
    CtrDrbg master(master_entropy);
    std::vector<Bytes> seeds;
    std::vector<Bytes> msgs;
    seeds.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        seeds.push_back(master.generate(48));
        if (!entry.is_kem) {
            msgs.push_back(master.generate(static_cast<std::size_t>(33) * (i + 1)));
        }
    }

    for (int i = 0; i < n; ++i) {
        CtrDrbg rng(seeds[static_cast<std::size_t>(i)]);
        auto [pk, sk] = keypair_from_drbg(entry, rng);
        if (entry.is_kem) {
            Bytes coins = rng.generate(entry.kem->coins_len);
            auto [ct, ss] = kem_apply(entry, pk, coins);
            KatKemCase c;
            c.count = i;
            c.seed = seeds[static_cast<std::size_t>(i)];
            c.pk = std::move(pk);
            c.sk = std::move(sk);
            c.ct = std::move(ct);
            c.ss = std::move(ss);
            file.kem_cases.push_back(std::move(c));
        } else {
            KatSignCase c;
            c.count = i;
            c.seed = seeds[static_cast<std::size_t>(i)];
            c.msg = msgs[static_cast<std::size_t>(i)];
            c.mlen = c.msg.size();
            c.pk = std::move(pk);
            c.sk = std::move(sk);
            c.sm = sig_apply(entry, c.sk, c.msg);
            c.smlen = c.sm.size();
            file.sign_cases.push_back(std::move(c));
        }
    }
    return file;
}

namespace {

void record(KatReport& report, KatCaseResult r) {
    if (r.pass) ++report.passed;
    report.cases.push_back(std::move(r));
}

}  // namespace

KatReport run_kat(Backend& backend, const SchemeEntry& entry, const KatFile& file) {
    if (file.is_kem != entry.is_kem) {
        throw std::invalid_argument("KAT file type does not match scheme");
    }
    KatReport report;
    if (entry.is_kem) {
        const PeDescriptor* apply_pe = backend.find_pe(entry.family, entry.nist_level, Operation::encapsulate);
        const PeDescriptor* verify_pe = backend.find_pe(entry.family, entry.nist_level, Operation::decapsulate);
        if (apply_pe == nullptr || verify_pe == nullptr) {
            throw NotFoundError(std::string("backend lacks PEs for ") + entry.name);
        }
        for (const auto& c : file.kem_cases) {
            KatCaseResult r{c.count, true, ""};
            try {
                // The enc coins sit after the two keypair draws in the seed's
                // DRBG stream; the stored ct/ss are never consulted for them.
                CtrDrbg rng(c.seed);
                rng.generate(32);
                rng.generate(32);
                Bytes coins = rng.generate(entry.kem->coins_len);
                auto [out, timing] = backend.run_job(*apply_pe, JobArgs{c.pk, coins});
                (void)timing;
                if (out.out0 != c.ct) {
                    r = {c.count, false, "ct"};
                } else if (out.out1 != c.ss) {
                    r = {c.count, false, "ss"};
                } else {
                    auto [vout, vtiming] = backend.run_job(*verify_pe, JobArgs{c.sk, c.ct});
                    (void)vtiming;
                    if (vout.out0 != c.ss) {
                        r = {c.count, false, "ss (decapsulate)"};
                    }
                }
            } catch (const std::exception& e) {
                r = {c.count, false, std::string("fault: ") + e.what()};
            }
            record(report, std::move(r));
        }
    } else {
        const PeDescriptor* apply_pe = backend.find_pe(entry.family, entry.nist_level, Operation::sign);
        const PeDescriptor* verify_pe = backend.find_pe(entry.family, entry.nist_level, Operation::verify);
        if (apply_pe == nullptr || verify_pe == nullptr) {
            throw NotFoundError(std::string("backend lacks PEs for ") + entry.name);
        }
        for (const auto& c : file.sign_cases) {
            KatCaseResult r{c.count, true, ""};
            try {
                auto [out, timing] = backend.run_job(*apply_pe, JobArgs{c.sk, c.msg});
                (void)timing;
                if (out.out0 != c.sm) {
                    r = {c.count, false, "sm"};
                } else {
                    auto [vout, vtiming] = backend.run_job(*verify_pe, JobArgs{c.pk, c.sm});
                    (void)vtiming;
                    if (!vout.accepted || vout.out0 != c.msg) {
                        r = {c.count, false, "msg"};
                    }
                }
            } catch (const std::exception& e) {
                r = {c.count, false, std::string("fault: ") + e.what()};
            }
            record(report, std::move(r));
        }
    }
    return report;
}

}  // namespace pqeval
