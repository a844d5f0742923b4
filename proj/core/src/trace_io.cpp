#include "cvgauss/trace_io.hpp"

#include "cvgauss/errors.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace cvgauss {
namespace {

constexpr std::array<const char*, 6> kRequiredKeys = {"format-version", "mode", "n_samples",
                                                      "eta", "v_el", "seed"};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_u64(const std::string& text, const char* key) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError(std::string("trace header: bad integer for ") + key + ": '" + text + "'");
    }
    return v;
}

void write_header(std::ostream& os, const TraceMeta& meta) {
    // format-version first so readers can reject early.
    const auto header = trace_header(meta);
    os << "format-version=" << header.at("format-version") << '\n';
    for (const auto& [key, value] : header) {
        if (key != "format-version") os << key << '=' << value << '\n';
    }
}

void put_le_double(std::ostream& os, double value) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
    std::array<char, 8> bytes{};
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
    os.write(bytes.data(), bytes.size());
}

double get_le_double(const unsigned char* bytes) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
    return std::bit_cast<double>(bits);
}

std::map<std::string, std::string> read_header_lines(std::istream& is, std::string* first_data_line) {
    std::map<std::string, std::string> header;
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (first_data_line) *first_data_line = line;
            break;
        }
        header[trim(std::string_view(line).substr(0, eq))] = trim(std::string_view(line).substr(eq + 1));
    }
    return header;
}

}  // namespace

std::string format_fixed(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    std::array<char, 512> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
    if (ec != std::errc()) throw FormatError("cannot format value");
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw FormatError("cannot parse number '" + t + "'");
    }
    return v;
}

std::map<std::string, std::string> trace_header(const TraceMeta& meta) {
    std::map<std::string, std::string> h;
    h["format-version"] = std::to_string(meta.format_version);
    h["mode"] = meta.mode_name();
    h["n_samples"] = std::to_string(meta.n_samples);
    h["eta"] = format_fixed(meta.eta);
    h["v_el"] = format_fixed(meta.v_el);
    h["electronic-noise-db"] = format_fixed(meta.electronic_noise_db);
    h["seed"] = std::to_string(meta.seed);
    h["ramp-period"] = format_fixed(meta.ramp_period);
    h["calibration-scale"] = format_fixed(meta.calibration_scale);
    h["phase-jitter"] = format_fixed(meta.phase_jitter);
    h["config-hash"] = meta.config_hash.empty() ? "none" : meta.config_hash;
    return h;
}

TraceMeta parse_trace_header(const std::map<std::string, std::string>& header) {
    for (const char* key : kRequiredKeys) {
        if (!header.contains(key)) throw FormatError(std::string("trace header is missing '") + key + "'");
    }
    TraceMeta meta;
    meta.format_version = static_cast<int>(parse_u64(header.at("format-version"), "format-version"));
    if (meta.format_version != kTraceFormatVersion) {
        throw FormatError("unsupported trace format-version " + header.at("format-version") +
                          " (expected " + std::to_string(kTraceFormatVersion) + ")");
    }
    const std::string& mode = header.at("mode");
    if (mode != "vacuum") {
        meta.mode = parse_mode_label(mode);
        if (!meta.mode) throw FormatError("trace header: unknown mode '" + mode + "'");
    }
    meta.n_samples = parse_u64(header.at("n_samples"), "n_samples");
    meta.eta = parse_double(header.at("eta"));
    meta.v_el = parse_double(header.at("v_el"));
    meta.seed = parse_u64(header.at("seed"), "seed");
    auto optional_double = [&](const char* key, double fallback) {
        const auto it = header.find(key);
        return it == header.end() ? fallback : parse_double(it->second);
    };
    meta.electronic_noise_db = optional_double("electronic-noise-db", 0.0);
    meta.ramp_period = optional_double("ramp-period", kDefaultRampPeriod);
    meta.calibration_scale = optional_double("calibration-scale", 1.0);
    meta.phase_jitter = optional_double("phase-jitter", 0.0);
    if (const auto it = header.find("config-hash"); it != header.end() && it->second != "none") {
        meta.config_hash = it->second;
    }
    return meta;
}

std::filesystem::path sidecar_path(const std::filesystem::path& binary_path) {
    std::filesystem::path p = binary_path;
    p += ".hdr";
    return p;
}

void write_trace(const std::filesystem::path& path, const HomodyneTrace& trace, TraceFormat format) {
    if (format == TraceFormat::text) {
        std::ofstream os(path);
        if (!os) throw FormatError("cannot open " + path.string() + " for writing");
        write_header(os, trace.meta);
        std::string line;
        for (const auto& s : trace.samples) {
            line = format_fixed(s.theta);
            line += ' ';
            line += format_fixed(s.x);
            line += '\n';
            os << line;
        }
        if (!os) throw FormatError("write failed: " + path.string());
        return;
    }
    {
        std::ofstream hdr(sidecar_path(path));
        if (!hdr) throw FormatError("cannot open " + sidecar_path(path).string() + " for writing");
        write_header(hdr, trace.meta);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    for (const auto& s : trace.samples) {
        put_le_double(os, s.theta);
        put_le_double(os, s.x);
    }
    if (!os) throw FormatError("write failed: " + path.string());
}

HomodyneTrace read_trace(const std::filesystem::path& path) {
    HomodyneTrace trace;
    if (path.extension() == ".bin") {
        std::ifstream hdr(sidecar_path(path));
        if (!hdr) throw FormatError("missing trace sidecar " + sidecar_path(path).string());
        trace.meta = parse_trace_header(read_header_lines(hdr, nullptr));

        std::ifstream is(path, std::ios::binary);
        if (!is) throw FormatError("cannot open " + path.string());
        std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        if (bytes.size() != trace.meta.n_samples * 16) {
            throw FormatError(path.string() + ": expected " + std::to_string(trace.meta.n_samples * 16) +
                              " bytes, found " + std::to_string(bytes.size()));
        }
        trace.samples.resize(trace.meta.n_samples);
        for (std::size_t i = 0; i < trace.meta.n_samples; ++i) {
            trace.samples[i] = {get_le_double(&bytes[16 * i]), get_le_double(&bytes[16 * i + 8])};
        }
        return trace;
    }

    std::ifstream is(path);
    if (!is) throw FormatError("cannot open " + path.string());
    std::string line;
    trace.meta = parse_trace_header(read_header_lines(is, &line));
    trace.samples.reserve(trace.meta.n_samples);
    do {
        if (trim(line).empty()) continue;
        const auto space = line.find(' ');
        if (space == std::string::npos) throw FormatError(path.string() + ": malformed sample line");
        trace.samples.push_back({parse_double(std::string_view(line).substr(0, space)),
                                 parse_double(std::string_view(line).substr(space + 1))});
    } while (std::getline(is, line));
    if (trace.samples.size() != trace.meta.n_samples) {
        throw FormatError(path.string() + ": header announces " + std::to_string(trace.meta.n_samples) +
                          " samples, found " + std::to_string(trace.samples.size()));
    }
    return trace;
}

}  // namespace cvgauss
