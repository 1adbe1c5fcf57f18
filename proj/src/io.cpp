#include "brw/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "brw/errors.hpp"
#include "brw/version.hpp"

namespace brw {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw mismatch_error("double formatting failed");
    return std::string(buf, end);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline mangling
    if (!out) throw mismatch_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mismatch_error("cannot open for reading: " + path);
    return in;
}

// `# key=value` line; returns false when the line is not a comment.
bool parse_header(const std::string& line, std::string& key, std::string& value) {
    if (line.empty() || line[0] != '#') return false;
    std::size_t start = line.find_first_not_of(" \t", 1);
    if (start == std::string::npos) return true;
    std::size_t eq = line.find('=', start);
    if (eq == std::string::npos) {
        key = line.substr(start);
        value.clear();
        return true;
    }
    key = line.substr(start, eq - start);
    value = line.substr(eq + 1);
    return true;
}

long long parse_ll(const std::string& s, const char* what) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw mismatch_error(std::string("malformed ") + what + ": " + s);
    return v;
}

}  // namespace

void write_run_csv(const RunRecord& rec, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# version=" << kVersion << "\n";
    out << "# kind=run-profile\n";
    out << "# model-hash=" << model_hash_hex(rec.model) << "\n";
    out << "# seed=" << rec.seed << "\n";
    out << "# rng=" << rec.rng_id << "\n";
    out << "# exact-threshold=" << rec.exact_threshold << "\n";
    out << "n,k,count\n";
    for (const Profile& p : rec.snapshots)
        for (const auto& [site, cnt] : p.counts)
            out << p.n << "," << site << "," << cnt.get_str() << "\n";
    if (!out) throw mismatch_error("write failed: " + path);
}

RunRecord read_run_csv(const std::string& path, const ModelSpec& model) {
    std::ifstream in = open_in(path);
    RunRecord rec;
    rec.model = model;
    std::string expect_hash = model_hash_hex(model);

    std::string line, key, value;
    bool saw_columns = false;
    int cur_n = -1;
    Profile cur;
    auto flush = [&]() {
        if (cur_n >= 0) {
            cur.n = cur_n;
            cur.population = 0;
            for (const auto& [site, cnt] : cur.counts) cur.population += cnt;
            rec.snapshots.push_back(std::move(cur));
            cur = Profile{};
        }
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (parse_header(line, key, value)) {
            if (key == "model-hash" && value != expect_hash)
                throw mismatch_error("run file was produced by a different model");
            if (key == "seed") rec.seed = static_cast<std::uint64_t>(parse_ll(value, "seed"));
            if (key == "rng") rec.rng_id = value;
            if (key == "exact-threshold")
                rec.exact_threshold = static_cast<unsigned long long>(parse_ll(value, "threshold"));
            continue;
        }
        if (!saw_columns) {
            if (line != "n,k,count") throw mismatch_error("unexpected run CSV columns: " + line);
            saw_columns = true;
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw mismatch_error("malformed run CSV row: " + line);
        long long n = parse_ll(line.substr(0, c1), "time index");
        long long k = parse_ll(line.substr(c1 + 1, c2 - c1 - 1), "site");
        std::string cnt = line.substr(c2 + 1);
        mpz_class c;
        if (mpz_set_str(c.get_mpz_t(), cnt.c_str(), 10) != 0 || c < 0)
            throw mismatch_error("malformed count: " + cnt);
        if (n != cur_n) {
            if (n < cur_n) throw mismatch_error("run CSV snapshots out of order");
            flush();
            cur_n = static_cast<int>(n);
        }
        cur.counts[k] += c;
    }
    flush();
    if (rec.snapshots.empty()) throw empty_profile_error("run CSV holds no rows");
    return rec;
}

void write_expected_csv(const ExpectedProfile& ep, const ModelSpec& model,
                        const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# version=" << kVersion << "\n";
    out << "# kind=expected-profile\n";
    out << "# model-hash=" << model_hash_hex(model) << "\n";
    out << "# exact=" << (ep.exact ? 1 : 0) << "\n";
    out << "n,k,value\n";
    if (ep.exact) {
        for (const auto& [site, w] : ep.weights)
            out << ep.n << "," << site << "," << w.get_str() << "\n";
    } else {
        for (const auto& [site, w] : ep.weights_d)
            out << ep.n << "," << site << "," << format_double(w) << "\n";
    }
    if (!out) throw mismatch_error("write failed: " + path);
}

ExpectedProfile read_expected_csv(const std::string& path, const ModelSpec& model) {
    std::ifstream in = open_in(path);
    std::string expect_hash = model_hash_hex(model);
    ExpectedProfile ep;
    bool exact = false;
    bool saw_columns = false;
    bool saw_n = false;
    std::string line, key, value;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (parse_header(line, key, value)) {
            if (key == "model-hash" && value != expect_hash)
                throw mismatch_error("expected-profile file was produced by a different model");
            if (key == "exact") exact = value == "1";
            continue;
        }
        if (!saw_columns) {
            if (line != "n,k,value") throw mismatch_error("unexpected expected CSV columns: " + line);
            saw_columns = true;
            ep.exact = exact;
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw mismatch_error("malformed expected CSV row: " + line);
        long long n = parse_ll(line.substr(0, c1), "time index");
        long long k = parse_ll(line.substr(c1 + 1, c2 - c1 - 1), "site");
        std::string val = line.substr(c2 + 1);
        if (saw_n && n != ep.n) throw mismatch_error("expected CSV mixes time indices");
        ep.n = static_cast<int>(n);
        saw_n = true;
        if (exact) {
            mpq_class q;
            if (mpq_set_str(q.get_mpq_t(), val.c_str(), 10) != 0 || q.get_den() == 0)
                throw mismatch_error("malformed rational value: " + val);
            mpq_canonicalize(q.get_mpq_t());
            ep.weights[k] = q;
        } else {
            try {
                ep.weights_d[k] = std::stod(val);
            } catch (const std::exception&) {
                throw mismatch_error("malformed value: " + val);
            }
        }
    }
    if (!saw_columns) throw mismatch_error("expected CSV has no column row");
    return ep;
}

}  // namespace brw
