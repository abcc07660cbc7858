#include "ncs/csv_io.hpp"

#include "ncs/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

namespace ncs {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw Error("not a number: '" + text + "'");
    }
    return v;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

long parse_long(const std::string& text) {
    long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw Error("not an integer: '" + text + "'");
    }
    return v;
}

constexpr const char* trace_header = "k,t,x_true,x_pred,s,i,u,J_running";

}  // namespace

void write_trace(std::ostream& out, const std::vector<SimulationRecord>& records) {
    out << trace_header << '\n';
    for (const auto& r : records) {
        out << r.k << ',' << format_double(r.t) << ',' << format_double(r.x_true) << ','
            << (r.x_pred ? format_double(*r.x_pred) : std::string{}) << ',' << r.s << ','
            << r.buffer_age << ',' << format_double(r.u) << ',' << format_double(r.running_cost)
            << '\n';
    }
}

std::vector<SimulationRecord> read_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != trace_header) {
        throw Error("trace CSV: missing header");
    }
    std::vector<SimulationRecord> records;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(line);
        if (f.size() != 8) throw Error("trace CSV: expected 8 fields in '" + line + "'");
        SimulationRecord r;
        r.k = parse_long(f[0]);
        r.t = parse_double(f[1]);
        r.x_true = parse_double(f[2]);
        if (!f[3].empty()) r.x_pred = parse_double(f[3]);
        r.s = static_cast<int>(parse_long(f[4]));
        r.buffer_age = static_cast<int>(parse_long(f[5]));
        r.u = parse_double(f[6]);
        r.running_cost = parse_double(f[7]);
        records.push_back(r);
    }
    return records;
}

void write_comparison(std::ostream& out, const ComparisonTable& table) {
    out << "seed";
    for (auto st : table.strategies) out << ',' << to_string(st);
    out << '\n';
    for (std::size_t i = 0; i < table.seeds.size(); ++i) {
        out << table.seeds[i];
        for (const auto& c : table.cost[i]) out << ',' << (c ? format_double(*c) : "diverged");
        out << '\n';
    }
}

std::vector<SamplePair> read_calibration_samples(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split(line) != std::vector<std::string>{"pair_id", "predicted", "measured"}) {
        throw CalibrationError("calibration CSV: header must be pair_id,predicted,measured");
    }
    std::vector<SamplePair> pairs;
    std::map<std::string, std::size_t> index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line);
        if (f.size() != 3) {
            throw CalibrationError("calibration CSV line " + std::to_string(line_no) + ": expected 3 fields");
        }
        auto [it, inserted] = index.try_emplace(f[0], pairs.size());
        if (inserted) pairs.emplace_back();
        auto& pair = pairs[it->second];
        try {
            pair.predicted.push_back(parse_double(f[1]));
            pair.measured.push_back(parse_double(f[2]));
        } catch (const Error& e) {
            throw CalibrationError("calibration CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (pairs.empty()) throw CalibrationError("calibration CSV has no samples");
    return pairs;
}

std::vector<SamplePair> read_calibration_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CalibrationError("cannot open calibration samples '" + path + "'");
    return read_calibration_samples(in);
}

std::vector<int> read_loss_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open loss trace '" + path + "'");
    std::vector<int> bits;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t != "0" && t != "1") throw ConfigError("loss trace '" + path + "': entries must be 0 or 1");
        bits.push_back(t == "1" ? 1 : 0);
    }
    if (bits.empty()) throw ConfigError("loss trace '" + path + "' is empty");
    return bits;
}

}  // namespace ncs
