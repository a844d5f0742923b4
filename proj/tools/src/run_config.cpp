#include "cvgauss_cli/run_config.hpp"

#include "cvgauss/cm_io.hpp"
#include "cvgauss/errors.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cvgauss::cli {

namespace {

double to_double(const std::string& key, const std::string& value) {
    try {
        const double v = parse_double(value);
        if (!std::isfinite(v)) throw FormatError("not finite");
        return v;
    } catch (const FormatError&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& value) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Field real(double RunConfig::*member, const char* key) {
    return {[member, key](RunConfig& c, const std::string& v) { c.*member = to_double(key, v); },
            [member](const RunConfig& c) { return format_sig15(c.*member); }};
}

Field integer(int RunConfig::*member, const char* key) {
    return {[member, key](RunConfig& c, const std::string& v) { c.*member = to_integer<int>(key, v); },
            [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

// Insertion order is the canonical order.
const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"nbar1", real(&RunConfig::nbar1, "nbar1")},
        {"nbar2", real(&RunConfig::nbar2, "nbar2")},
        {"nbar_s", real(&RunConfig::nbar_s, "nbar_s")},
        {"phi_s", real(&RunConfig::phi_s, "phi_s")},
        {"xi1", real(&RunConfig::xi1, "xi1")},
        {"xi1_phase", real(&RunConfig::xi1_phase, "xi1_phase")},
        {"xi2", real(&RunConfig::xi2, "xi2")},
        {"xi2_phase", real(&RunConfig::xi2_phase, "xi2_phase")},
        {"beta", real(&RunConfig::beta, "beta")},
        {"beta_phase", real(&RunConfig::beta_phase, "beta_phase")},
        {"eta_channel", real(&RunConfig::eta_channel, "eta_channel")},
        {"eta_channel_b",
         {[](RunConfig& c, const std::string& v) { c.eta_channel_b = to_double("eta_channel_b", v); },
          [](const RunConfig& c) { return c.eta_channel_b ? format_sig15(*c.eta_channel_b) : std::string("none"); }}},
        {"eta", real(&RunConfig::eta, "eta")},
        {"electronic_noise_db", real(&RunConfig::electronic_noise_db, "electronic_noise_db")},
        {"n_samples",
         {[](RunConfig& c, const std::string& v) { c.n_samples = to_integer<std::size_t>("n_samples", v); },
          [](const RunConfig& c) { return std::to_string(c.n_samples); }}},
        {"seed",
         {[](RunConfig& c, const std::string& v) { c.seed = to_integer<std::uint64_t>("seed", v); },
          [](const RunConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string("none"); }}},
        {"lo_phase_offset", real(&RunConfig::lo_phase_offset, "lo_phase_offset")},
        {"scheme",
         {[](RunConfig& c, const std::string& v) {
              const auto s = parse_scheme(v);
              if (!s) throw ConfigError("config key 'scheme': expected six, five-drop-f or five-drop-e, got '" + v + "'");
              c.scheme = *s;
          },
          [](const RunConfig& c) { return std::string(to_string(c.scheme)); }}},
        {"phase_jitter", real(&RunConfig::phase_jitter, "phase_jitter")},
        {"kurtosis_bins", integer(&RunConfig::kurtosis_bins, "kurtosis_bins")},
        {"n_max", integer(&RunConfig::n_max, "n_max")},
        {"wigner_points", integer(&RunConfig::wigner_points, "wigner_points")},
        {"wigner_extent", real(&RunConfig::wigner_extent, "wigner_extent")},
        {"theta_points", integer(&RunConfig::theta_points, "theta_points")},
        {"format",
         {[](RunConfig& c, const std::string& v) {
              if (v == "text") c.format = TraceFormat::text;
              else if (v == "binary") c.format = TraceFormat::binary;
              else throw ConfigError("config key 'format': expected text or binary, got '" + v + "'");
          },
          [](const RunConfig& c) { return std::string(to_string(c.format)); }}},
    };
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& [name, field] : fields()) {
        if (name == key) return &field;
    }
    return nullptr;
}

void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(std::string("config key '") + key + "': " + what);
}

}  // namespace

std::string_view to_string(TraceFormat format) {
    return format == TraceFormat::binary ? "binary" : "text";
}

OpoParams RunConfig::opo_params() const {
    OpoParams p;
    p.nbar1 = nbar1;
    p.nbar2 = nbar2;
    p.two_mode_squeeze = std::polar(squeeze_from_entangling_photons(nbar_s), phi_s);
    p.local_squeeze1 = std::polar(xi1, xi1_phase);
    p.local_squeeze2 = std::polar(xi2, xi2_phase);
    p.mixing = std::polar(beta, beta_phase);
    p.eta_channel = eta_channel;
    p.eta_channel_b = eta_channel_b;
    return p;
}

NoiseModel RunConfig::noise_model() const {
    return NoiseModel::from_db(eta, electronic_noise_db);
}

void RunConfig::validate() const {
    require(nbar1 >= 0.0, "nbar1", "must be non-negative");
    require(nbar2 >= 0.0, "nbar2", "must be non-negative");
    require(nbar_s >= 0.0, "nbar_s", "must be non-negative");
    require(xi1 >= 0.0, "xi1", "magnitude must be non-negative");
    require(xi2 >= 0.0, "xi2", "magnitude must be non-negative");
    require(beta >= 0.0, "beta", "magnitude must be non-negative");
    require(eta_channel > 0.0 && eta_channel <= 1.0, "eta_channel", "must lie in (0, 1]");
    require(!eta_channel_b || (*eta_channel_b > 0.0 && *eta_channel_b <= 1.0), "eta_channel_b", "must lie in (0, 1]");
    require(eta > 0.0 && eta <= 1.0, "eta", "must lie in (0, 1]");
    require(electronic_noise_db >= 0.0, "electronic_noise_db", "must be non-negative");
    require(n_samples > 0, "n_samples", "must be positive");
    require(lo_phase_offset >= 0.0, "lo_phase_offset", "must be non-negative");
    require(phase_jitter >= 0.0, "phase_jitter", "must be non-negative");
    require(kurtosis_bins > 0, "kurtosis_bins", "must be positive");
    require(n_max > 0, "n_max", "must be positive");
    require(wigner_points >= 2, "wigner_points", "must be at least 2");
    require(wigner_extent > 0.0, "wigner_extent", "must be positive");
    require(theta_points >= 2, "theta_points", "must be at least 2");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.first);
        return k;
    }();
    return keys;
}

RunConfig parse_config(const std::string& text) {
    KeyValueDocument doc;
    try {
        doc = KeyValueDocument::parse(text);
    } catch (const FormatError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig config;
    std::set<std::string> seen;
    for (const auto& [key, value] : doc.entries()) {
        if (key.empty()) continue;
        const Field* field = find_field(key);
        if (!field) throw ConfigError("unknown config key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError("config key '" + key + "' given twice");
        field->set(config, value);
    }
    config.validate();
    return config;
}

RunConfig read_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& config) {
    std::string out;
    for (const auto& [key, field] : fields()) out += key + "=" + field.get(config) + "\n";
    return out;
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canonical_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cvgauss::cli
