#include "cvgauss_cli/commands.hpp"

#include "cvgauss/cm_io.hpp"
#include "cvgauss/entanglement.hpp"
#include "cvgauss/errors.hpp"
#include "cvgauss/fock.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace cvgauss::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw FormatError("cannot create output directory " + dir.string());
}

ordered_json read_manifest(const fs::path& dir) {
    std::ifstream is(dir / kManifestName);
    if (!is) return ordered_json::object();
    try {
        return ordered_json::parse(is);
    } catch (const nlohmann::json::exception&) {
        return ordered_json::object();
    }
}

void write_manifest(const fs::path& dir, const ordered_json& manifest) {
    std::ofstream os(dir / kManifestName, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot write " + (dir / kManifestName).string());
    os << manifest.dump(2) << "\n";
}

ordered_json config_json(const RunConfig& config) {
    ordered_json j = ordered_json::object();
    std::istringstream lines(canonical_config(config));
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find('=');
        j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

// Header of the run, shared by every section.
void stamp(ordered_json& manifest, const std::string& hash) {
    manifest["format-version"] = kDocumentFormatVersion;
    manifest["config-hash"] = hash;
}

std::optional<fs::path> locate_trace(const fs::path& dir, std::string_view mode) {
    for (auto format : {TraceFormat::text, TraceFormat::binary}) {
        const auto p = dir / trace_file_name(mode, format);
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

HomodyneTrace load_trace(const fs::path& dir, std::string_view mode, Scheme scheme) {
    const auto path = locate_trace(dir, mode);
    if (!path) {
        std::string what = mode == "vacuum" ? std::string("the vacuum calibration trace")
                                            : "scheme " + std::string(to_string(scheme)) + " needs a trace for mode " +
                                                  std::string(mode);
        throw MissingInput(what + " (no " + trace_file_name(mode, TraceFormat::text) + " in " + dir.string() + ")");
    }
    return read_trace(*path);
}

class Table {
public:
    Table(const fs::path& path, const std::string& kind, const std::string& hash) : path_(path), os_(path, std::ios::binary) {
        if (!os_) throw FormatError("cannot write " + path.string());
        os_ << "# kind=" << kind << "\n# config-hash=" << hash << "\n# format-version=" << kDocumentFormatVersion << "\n";
    }
    void header(std::initializer_list<std::string_view> columns) { row_strings(columns); }
    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            os_ << (first ? "" : "\t") << format_sig15(v);
            first = false;
        }
        os_ << "\n";
    }
    std::string name() const { return path_.filename().string(); }

private:
    void row_strings(std::initializer_list<std::string_view> columns) {
        bool first = true;
        for (auto c : columns) {
            os_ << (first ? "" : "\t") << c;
            first = false;
        }
        os_ << "\n";
    }
    fs::path path_;
    std::ofstream os_;
};

void put_metric(KeyValueDocument& doc, const std::string& key, const std::optional<double>& value,
                std::optional<double> error = std::nullopt) {
    if (!value) {
        doc.set(key, std::string("skipped"));
        return;
    }
    doc.set(key, format_sig15(*value));
    if (error) doc.set(key + ".error", format_sig15(*error));
}

}  // namespace

std::string trace_file_name(std::string_view mode, TraceFormat format) {
    return "trace_" + std::string(mode) + (format == TraceFormat::binary ? ".bin" : ".txt");
}

SimulateResult cmd_simulate(const RunConfig& config, const fs::path& out) {
    config.validate();
    if (!config.seed) throw ConfigError("config key 'seed' is required for simulate (or pass --seed)");
    const auto sigma = build_opo_state(config.opo_params());
    const auto noise = config.noise_model();
    const std::string hash = config_hash(config);
    ensure_directory(out);

    ordered_json manifest = ordered_json::object();
    stamp(manifest, hash);
    manifest["config"] = config_json(config);
    ordered_json files = ordered_json::array();

    SimulateResult result{hash, 0};
    auto emit = [&](HomodyneTrace trace, std::string_view name, std::uint64_t seed) {
        trace.meta.config_hash = hash;
        const auto file = trace_file_name(name, config.format);
        write_trace(out / file, trace, config.format);
        files.push_back({{"mode", name}, {"file", file}, {"seed", seed}, {"n_samples", trace.size()}});
        ++result.files_written;
    };
    for (auto mode : kAllModes) {
        const auto name = to_string(mode);
        const auto seed = derive_seed(*config.seed, name);
        auto trace = simulate_trace(sigma, mode, noise, config.n_samples, seed);
        if (config.lo_phase_offset > 0.0) {
            trace = inject_phase_offset(trace, config.lo_phase_offset,
                                        derive_seed(*config.seed, "lo-offset-" + std::string(name)));
        }
        emit(std::move(trace), name, seed);
    }
    const auto vacuum_seed = derive_seed(*config.seed, "vacuum");
    emit(simulate_vacuum_trace(noise, config.n_samples, vacuum_seed), "vacuum", vacuum_seed);

    manifest["simulate"] = {{"seed", *config.seed}, {"format", to_string(config.format)}, {"files", files}};
    write_manifest(out, manifest);
    return result;
}

ReconstructResult cmd_reconstruct(const RunConfig& config, const fs::path& trace_dir, const fs::path& out) {
    config.validate();
    if (!fs::is_directory(trace_dir)) throw MissingInput("trace directory " + trace_dir.string() + " does not exist");
    std::map<ModeLabel, HomodyneTrace> traces;
    for (auto mode : required_modes(config.scheme)) traces[mode] = load_trace(trace_dir, to_string(mode), config.scheme);
    const auto vacuum = load_trace(trace_dir, "vacuum", config.scheme);

    const std::string hash = vacuum.meta.config_hash;
    for (const auto& [mode, t] : traces) {
        if (t.meta.config_hash != hash) {
            throw FormatError("trace for mode " + std::string(to_string(mode)) + " has config-hash " +
                              t.meta.config_hash + ", the vacuum trace has " + hash);
        }
    }

    ReconstructionOptions options;
    options.scheme = config.scheme;
    options.eta = vacuum.meta.eta;  // the efficiency recorded with the data
    options.phase_jitter = config.phase_jitter;
    options.kurtosis_bins = config.kurtosis_bins;
    const auto rec = reconstruct(traces, vacuum, options);

    ensure_directory(out);
    CmDocument doc;
    doc.cm = rec.cm;
    doc.errors = rec.entry_errors;
    doc.config_hash = hash;
    std::string modes;
    for (auto m : rec.mode_inventory) modes += (modes.empty() ? "" : " ") + std::string(to_string(m));
    doc.metadata = {{"scheme", std::string(to_string(rec.scheme))},
                    {"physical", rec.physical ? "true" : "false"},
                    {"modes", modes},
                    {"eta", format_sig15(options.eta)},
                    {"calibration-scale", format_sig15(rec.calibration_scale)},
                    {"phase-jitter", format_sig15(rec.phase_jitter)}};
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            const auto key = std::to_string(i + 1) + std::to_string(j + 1);
            doc.metadata.emplace_back("error-source." + key, std::string(to_string(rec.error_sources[i][j])));
        }
    }
    write_cm_document(out / kCmName, doc);

    KeyValueDocument g;
    g.set("kind", std::string("gaussianity"));
    g.set("format-version", std::to_string(kDocumentFormatVersion));
    g.set("config-hash", hash);
    g.set("phase-bins", std::to_string(config.kurtosis_bins));
    ReconstructResult result{rec.physical, true};
    for (const auto& [mode, report] : rec.gaussianity) {
        const std::string prefix = "mode." + std::string(to_string(mode));
        int failing = 0;
        for (const auto& b : report.bins) failing += b.pass ? 0 : 1;
        g.set(prefix + ".pass", report.pass);
        g.set(prefix + ".worst-ratio", format_sig15(report.worst_ratio));
        g.set(prefix + ".failing-bins", std::to_string(failing));
        result.gaussian = result.gaussian && report.pass;
    }
    g.set("pass", result.gaussian);
    g.write(out / kGaussianityName);

    auto manifest = read_manifest(out);
    stamp(manifest, hash);
    manifest["reconstruct"] = {{"trace-dir", trace_dir.string()},
                               {"scheme", to_string(rec.scheme)},
                               {"physical", rec.physical},
                               {"gaussian", result.gaussian},
                               {"outputs", {kCmName, kGaussianityName}}};
    write_manifest(out, manifest);
    return result;
}

AnalyzeResult cmd_analyze(const RunConfig& config, const fs::path& cm_path, const fs::path& out) {
    config.validate();
    if (!fs::exists(cm_path)) throw MissingInput("covariance-matrix document " + cm_path.string() + " does not exist");
    const auto doc = read_cm_document(cm_path);
    const auto& sigma = doc.cm;
    const auto& hash = doc.config_hash;
    const auto report = full_report(sigma, doc.errors);
    ensure_directory(out);

    KeyValueDocument r;
    r.set("kind", std::string("report"));
    r.set("format-version", std::to_string(kDocumentFormatVersion));
    r.set("config-hash", hash);
    r.set("source", cm_path.filename().string());
    r.set("physical", report.physical);
    const auto& u = report.uncertainties;
    put_metric(r, "nu_minus", report.nu_minus, u ? std::optional(u->nu_minus) : std::nullopt);
    put_metric(r, "nu_plus", report.nu_plus);
    put_metric(r, "purity", report.purity, u ? std::optional(u->purity) : std::nullopt);
    put_metric(r, "nu_tilde_minus", report.nu_tilde_minus, u ? std::optional(u->nu_tilde_minus) : std::nullopt);
    put_metric(r, "log_negativity", report.log_negativity, u ? std::optional(u->log_negativity) : std::nullopt);
    put_metric(r, "eof_ebits", report.eof);
    put_metric(r, "duan", report.duan.value, u ? std::optional(u->duan) : std::nullopt);
    r.set("duan.bound", report.duan.separable_bound);
    r.set("duan.witnessed", report.duan.witnessed());
    if (report.epr) {
        r.set("epr.a_given_b", report.epr->a_given_b);
        r.set("epr.b_given_a", report.epr->b_given_a);
        r.set("epr.bound", report.epr->bound);
        r.set("epr.witnessed", report.epr->witnessed());
    } else {
        r.set("epr", std::string("skipped"));
    }

    std::vector<std::string> outputs = {kReportName};
    const std::array<ModeLabel, 6> modes = kAllModes;

    {
        Table t(out / "variance_theta.tsv", "quadrature-variance", hash);
        t.header({"theta", "a", "b", "c", "d", "e", "f", "shot_noise"});
        std::array<SingleModeCM, 6> cms;
        for (std::size_t k = 0; k < modes.size(); ++k) cms[k] = mode_cm(sigma, modes[k]);
        for (int i = 0; i < config.theta_points; ++i) {
            const double th = 2.0 * std::numbers::pi * i / (config.theta_points - 1);
            t.row({th, quadrature_variance(cms[0], th), quadrature_variance(cms[1], th), quadrature_variance(cms[2], th),
                   quadrature_variance(cms[3], th), quadrature_variance(cms[4], th), quadrature_variance(cms[5], th),
                   kVacuumVariance});
        }
        outputs.push_back(t.name());
    }

    if (report.physical) {
        try {
            r.set("noise_reduction", noise_reduction_factor(sigma));
        } catch (const InvalidArgument&) {
            r.set("noise_reduction", std::string("undefined"));  // no photons
        }
        const auto p = joint_distribution(sigma, config.n_max);
        r.set("fock.n_max", std::to_string(config.n_max));
        r.set("fock.truncation_deficit", p.truncation_deficit());
        r.set("fock.truncation_warning", p.truncation_warning());
        {
            Table t(out / "photon_joint.tsv", "photon-joint", hash);
            t.header({"n", "m", "p"});
            for (int n = 0; n <= config.n_max; ++n) {
                for (int m = 0; m <= config.n_max; ++m) t.row({double(n), double(m), p.joint(n, m)});
            }
            outputs.push_back(t.name());
        }
        {
            Table t(out / "photon_marginals.tsv", "photon-marginals", hash);
            t.header({"n", "p_a", "p_b", "p_c", "p_d"});
            const Eigen::VectorXd pa = p.marginal_a(), pb = p.marginal_b();
            const auto pc = single_mode_distribution(combine_modes(sigma, ModeLabel::c), config.n_max);
            const auto pd = single_mode_distribution(combine_modes(sigma, ModeLabel::d), config.n_max);
            for (int n = 0; n <= config.n_max; ++n) t.row({double(n), pa(n), pb(n), pc.single(n), pd.single(n)});
            outputs.push_back(t.name());
        }
        for (auto mode : {ModeLabel::c, ModeLabel::d}) {
            const auto name = std::string(to_string(mode));
            Table t(out / ("wigner_" + name + ".tsv"), "wigner-" + name, hash);
            t.header({"x", "y", "w"});
            std::vector<PhasePoint> grid;
            const int n = config.wigner_points;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    grid.push_back({-config.wigner_extent + 2.0 * config.wigner_extent * i / (n - 1),
                                    -config.wigner_extent + 2.0 * config.wigner_extent * j / (n - 1)});
                }
            }
            const auto w = wigner(combine_modes(sigma, mode), grid);
            for (std::size_t k = 0; k < grid.size(); ++k) t.row({grid[k].x, grid[k].y, w[k]});
            outputs.push_back(t.name());
        }
    } else {
        r.set("noise_reduction", std::string("skipped"));
        r.set("fock", std::string("skipped"));
        r.set("wigner", std::string("skipped"));
    }

    r.comment("measured values quoted for comparison");
    r.set("comparison.nu_minus", 0.68);
    r.set("comparison.purity", 0.31);
    r.set("comparison.nu_tilde_minus", 0.24);
    r.set("comparison.log_negativity", 0.73);
    r.set("comparison.noise_reduction", 0.50);
    r.write(out / kReportName);

    auto manifest = read_manifest(out);
    stamp(manifest, hash);
    manifest["analyze"] = {{"cm", cm_path.string()}, {"physical", report.physical}, {"outputs", outputs}};
    write_manifest(out, manifest);
    return {report.physical};
}

int cmd_pipeline(const RunConfig& config, const fs::path& out) {
    const auto sim = cmd_simulate(config, out);
    std::cout << "simulate: " << sim.files_written << " trace files, config-hash " << sim.config_hash << "\n";
    const auto rec = cmd_reconstruct(config, out, out);
    std::cout << "reconstruct: " << (rec.physical ? "physical" : "UNPHYSICAL") << " CM, gaussianity "
              << (rec.gaussian ? "pass" : "FAIL") << "\n";
    const auto ana = cmd_analyze(config, out / kCmName, out);
    std::cout << "analyze: report in " << (out / kReportName).string() << "\n";
    return rec.physical && ana.physical ? kExitOk : kExitUnphysical;
}

}  // namespace cvgauss::cli
