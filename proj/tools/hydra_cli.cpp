#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hydra/channel.hpp"
#include "hydra/config.hpp"
#include "hydra/detector.hpp"
#include "hydra/keystream.hpp"
#include "hydra/scenario.hpp"
#include "hydra/signed_permutation.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string attack_mode;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_attack) {
    cmd->add_option("--config", opts.config_path, "scenario config file (key = value lines)");
    cmd->add_option("--seed", opts.seed,
                    "override the RNG seeds (noise gets N, the channel N + 1)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides scenario.output_dir)");
    if (with_attack)
        cmd->add_option("--attack", opts.attack_mode,
                        "attack mode: none, replay_payload, replay_packet, bias_injection");
}

hydra::ScenarioConfig build_config(const CommonOpts& opts) {
    hydra::ScenarioConfig cfg = opts.config_path.empty()
                                    ? hydra::default_scenario_config()
                                    : hydra::load_scenario_config(opts.config_path);
    if (opts.seed) {
        cfg.noise.rng_seed = *opts.seed;
        cfg.channel.rng_seed = *opts.seed + 1;
    }
    if (!opts.out_dir.empty())
        cfg.output_dir = opts.out_dir;
    if (!opts.attack_mode.empty())
        cfg.attack.mode = hydra::attack_mode_from_name(opts.attack_mode);
    cfg.validate();
    return cfg;
}

void print_summary(const hydra::RunLog& log) {
    const auto& s = log.summary;
    std::cout << "steps:               " << log.records.size() << "\n";
    std::cout << "alarms:              " << s.alarms << "\n";
    std::cout << "onset:               " << (s.onset ? std::to_string(*s.onset) : "none") << "\n";
    std::cout << "detection delay:     "
              << (s.detection_delay ? std::to_string(*s.detection_delay) : "none") << "\n";
    std::cout << "false alarm rate:    " << s.false_alarm_rate << "\n";
    std::cout << "dropped packets:     " << s.dropped_packets << "\n";
    std::cout << "missing-data alarms: " << s.missing_data_alarms << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic three-tank control-loop simulator with coded sensor output"};
    app.require_subcommand(1);

    CommonOpts run_opts, cal_opts;
    std::string thresholds_path;

    CLI::App* run_cmd = app.add_subcommand(
        "run", "full scenario: calibration phase, then the configured attack");
    add_common(run_cmd, run_opts, true);
    run_cmd->add_option("--thresholds", thresholds_path,
                        "load residual thresholds from a file instead of calibrating");

    CLI::App* cal_cmd =
        app.add_subcommand("calibrate", "run the healthy calibration phase and save thresholds");
    add_common(cal_cmd, cal_opts, false);

    std::uint64_t period_p = 1, period_m = 48;
    CLI::App* period_cmd =
        app.add_subcommand("period", "print the keystream period for a p value and modulus");
    period_cmd->add_option("--p", period_p, "Fibonacci p-sequence parameter");
    period_cmd->add_option("--modulus", period_m, "modulus (codebook size)");

    int codebook_n = 3;
    CLI::App* codebook_cmd =
        app.add_subcommand("codebook", "dump the sorted signed-permutation codebook");
    codebook_cmd->add_option("--n", codebook_n, "vector dimension (1..5)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            hydra::ScenarioConfig cfg = build_config(run_opts);
            std::optional<hydra::ThresholdVector> preset;
            if (!thresholds_path.empty())
                preset = hydra::load_thresholds(thresholds_path);
            hydra::RunLog log = hydra::run_scenario(cfg, preset);
            const std::filesystem::path dir = cfg.output_dir;
            hydra::emit_csv(log, dir);
            hydra::emit_packets_csv(log, dir);
            hydra::emit_plot_data(log, dir);
            if (thresholds_path.empty())
                hydra::save_thresholds(dir / "thresholds.txt", log.summary.thresholds);
            print_summary(log);
            std::cout << "outputs in " << dir.string() << "\n";
        } else if (cal_cmd->parsed()) {
            hydra::ScenarioConfig cfg = build_config(cal_opts);
            hydra::RunLog log = hydra::run_calibration_only(cfg);
            const std::filesystem::path dir = cfg.output_dir;
            hydra::emit_csv(log, dir);
            hydra::save_thresholds(dir / "thresholds.txt", log.summary.thresholds);
            std::cout << "calibrated over " << log.records.size() << " steps\n";
            std::cout << "thresholds written to " << (dir / "thresholds.txt").string() << "\n";
        } else if (period_cmd->parsed()) {
            std::cout << hydra::fib_p_period(static_cast<std::uint32_t>(period_p), period_m)
                      << "\n";
        } else if (codebook_cmd->parsed()) {
            if (codebook_n < 1 || codebook_n > 5)
                throw hydra::ConfigError("codebook dump supports n in 1..5");
            const std::uint64_t size = hydra::codebook_size(codebook_n);
            std::cout << "# index perm signs (" << size << " entries)\n";
            for (std::uint64_t i = 0; i < size; ++i) {
                const auto sp = hydra::unrank(i, codebook_n);
                std::cout << i << " ";
                for (int j = 0; j < sp.size(); ++j)
                    std::cout << sp.perm(j) << (j + 1 < sp.size() ? "," : "");
                std::cout << " ";
                for (int j = 0; j < sp.size(); ++j)
                    std::cout << (sp.sign(j) > 0 ? "+" : "-");
                std::cout << "\n";
            }
        }
    } catch (const hydra::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hydra::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
