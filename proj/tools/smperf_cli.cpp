// smperf: analytical ABEP bounds and Monte Carlo BER for SM/SSK MIMO links.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "smperf/smperf.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitRuntime = 4;

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spatial-modulation error-rate bounds and simulation"};

    std::string config_path;
    std::string preset_name;
    std::string mode_text = "bound";
    std::string out_path = "smperf.csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> quad_nodes;
    std::string snr_text;
    std::string prefactor_text;
    unsigned threads = 0;
    bool dump_config = false;

    auto* config_opt = app.add_option("--config", config_path, "key=value experiment file");
    auto* preset_opt = app.add_option("--preset", preset_name, "built-in experiment: fig1, fig2, fig3");
    config_opt->excludes(preset_opt);
    app.add_option("--mode", mode_text, "bound, sim or both")->check(CLI::IsMember({"bound", "sim", "both"}));
    app.add_option("--out", out_path, "CSV output path (suffixed _R<rate> for multi-curve runs)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes for the bound");
    app.add_option("--snr", snr_text, "SNR grid START:STOP:STEP in dB");
    app.add_option("--prefactor", prefactor_text, "union-bound prefactor: paper or conventional");
    app.add_option("--threads", threads, "worker threads (0 = SMPERF_THREADS or all cores)");
    app.add_flag("--dump-config", dump_config, "print the resolved configuration and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty() && preset_name.empty())
            throw smperf::Error(smperf::ErrorCode::config, "one of --config or --preset is required");
        smperf::ExperimentConfig cfg =
            config_path.empty() ? smperf::preset(preset_name) : smperf::load_config(config_path);
        if (seed)
            cfg.seed = *seed;
        if (quad_nodes)
            cfg.quad_nodes = *quad_nodes;
        if (!snr_text.empty())
            cfg.snr = smperf::parse_snr_range(snr_text, "--snr");
        if (!prefactor_text.empty())
            cfg.prefactor = smperf::parse_prefactor(prefactor_text, "--prefactor");
        smperf::validate(cfg);

        if (dump_config) {
            std::cout << smperf::serialize_config(cfg);
            return 0;
        }
        smperf::run_experiment(cfg, smperf::parse_mode(mode_text), out_path, threads, &std::cerr,
                               &std::cout);
    } catch (const smperf::Error& e) {
        std::cerr << "smperf: " << e.what() << '\n';
        if (e.code() == smperf::ErrorCode::io)
            return kExitIo;
        if (e.code() == smperf::ErrorCode::config)
            return kExitConfig;
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "smperf: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
