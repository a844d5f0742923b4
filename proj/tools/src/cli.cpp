#include "cvgauss_cli/commands.hpp"

#include "cvgauss/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cvgauss::cli {

namespace {

struct Flags {
    std::string config;
    std::string out = "cvgauss_out";
    std::optional<std::string> scheme;
    std::optional<int> n_max;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::string traces;
    std::string cm;
};

std::string config_help() {
    std::string text =
        "Config file: key=value lines, '#' starts a comment. Unknown keys are errors.\n"
        "Defaults reproduce the reference state (nbar1=0.67, nbar2=0.18, nbar_s=0.87,\n"
        "eta=0.88, electronic_noise_db=16, n_samples=1000000). seed has no default.\nKeys:";
    for (const auto& k : config_keys()) text += " " + k;
    text +=
        "\n\nExit codes: 0 success, 1 other failure, 2 config or usage error,\n"
        "3 missing or unreadable input, 4 reconstructed CM is unphysical.";
    return text;
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "Run configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
}

RunConfig resolve(const Flags& f) {
    RunConfig config = f.config.empty() ? RunConfig{} : read_config(f.config);
    if (f.seed) config.seed = *f.seed;
    if (f.n_max) config.n_max = *f.n_max;
    if (f.scheme) config.scheme = *parse_scheme(*f.scheme);
    if (f.format) config.format = *f.format == "binary" ? TraceFormat::binary : TraceFormat::text;
    config.validate();
    return config;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"cvgauss: simulate homodyne tomography of a two-mode Gaussian OPO state,\n"
                 "reconstruct its covariance matrix and analyze its entanglement."};
    app.footer(config_help());
    app.require_subcommand(1);
    Flags f;

    auto* simulate = app.add_subcommand("simulate", "Write six mode traces and a vacuum trace");
    add_common(simulate, f);
    simulate->add_option("--seed", f.seed, "Master seed (overrides the config)");
    simulate->add_option("--format", f.format, "Trace format")->check(CLI::IsMember({"text", "binary"}));

    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct the covariance matrix from traces");
    add_common(reconstruct, f);
    reconstruct->add_option("--traces", f.traces, "Trace directory (default: --out)");
    reconstruct->add_option("--scheme", f.scheme, "Mode set")->check(CLI::IsMember({"six", "five-drop-f", "five-drop-e"}));

    auto* analyze = app.add_subcommand("analyze", "Entanglement, photon statistics and plot tables");
    add_common(analyze, f);
    analyze->add_option("--cm", f.cm, "Covariance-matrix document (default: <out>/cm.txt)");
    analyze->add_option("--nmax", f.n_max, "Fock cutoff")->check(CLI::PositiveNumber);

    auto* pipeline = app.add_subcommand("pipeline", "simulate, reconstruct and analyze in one directory");
    add_common(pipeline, f);
    pipeline->add_option("--seed", f.seed, "Master seed (overrides the config)");
    pipeline->add_option("--scheme", f.scheme, "Mode set")->check(CLI::IsMember({"six", "five-drop-f", "five-drop-e"}));
    pipeline->add_option("--nmax", f.n_max, "Fock cutoff")->check(CLI::PositiveNumber);
    pipeline->add_option("--format", f.format, "Trace format")->check(CLI::IsMember({"text", "binary"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const RunConfig config = resolve(f);
        const std::filesystem::path out = f.out;
        if (simulate->parsed()) {
            const auto r = cmd_simulate(config, out);
            std::cout << "wrote " << r.files_written << " trace files to " << out.string() << " (config-hash "
                      << r.config_hash << ")\n";
            return kExitOk;
        }
        if (reconstruct->parsed()) {
            const auto r = cmd_reconstruct(config, f.traces.empty() ? out : std::filesystem::path(f.traces), out);
            std::cout << "wrote " << (out / kCmName).string() << ": " << (r.physical ? "physical" : "UNPHYSICAL")
                      << ", gaussianity " << (r.gaussian ? "pass" : "FAIL") << "\n";
            return r.physical ? kExitOk : kExitUnphysical;
        }
        if (analyze->parsed()) {
            const auto r = cmd_analyze(config, f.cm.empty() ? out / kCmName : std::filesystem::path(f.cm), out);
            std::cout << "wrote " << (out / kReportName).string() << (r.physical ? "" : " (unphysical CM)") << "\n";
            return r.physical ? kExitOk : kExitUnphysical;
        }
        return cmd_pipeline(config, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MissingInput& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace cvgauss::cli
