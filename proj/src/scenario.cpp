#include "hydra/scenario.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "hydra/adversary.hpp"
#include "hydra/ekf.hpp"
#include "hydra/rng.hpp"
#include "hydra/text.hpp"

namespace hydra {

namespace {

RunLog run_loop(const ScenarioConfig& cfg, std::size_t horizon, bool arm_attack,
                const std::optional<ThresholdVector>& preset_thresholds) {
    cfg.validate();
    const std::size_t calibration_len = cfg.calibration_len;

    NoiseSource noise(cfg.noise);
    Channel channel(cfg.channel);
    Receiver receiver(cfg.channel);

    TankState x;
    x.levels = cfg.x0;

    EkfState ekf;
    ekf.xhat = cfg.x0 * (1.0 + cfg.ekf.init_offset);
    ekf.P = Eigen::Matrix3d::Identity() * cfg.ekf.p0;
    ekf.phase = EkfPhase::initial;

    std::optional<Adversary> adversary;
    if (arm_attack && cfg.attack.mode != AttackMode::none)
        adversary.emplace(cfg.attack);

    Eigen::Vector3d last_decoded = ekf.xhat; // controller's view before the first packet

    std::vector<Eigen::VectorXd> calibration_history;
    std::optional<ThresholdVector> thresholds;

    RunLog log;
    log.records.reserve(horizon);
    log.packet_log.reserve(horizon);

    std::size_t loss_streak = 0;
    std::size_t decided_h1_before_onset = 0;
    std::size_t decided_before_onset = 0;
    ActuatorInput u{0.0, 0.0};

    for (std::size_t k = 0; k < horizon; ++k) {
        StepRecord rec;
        rec.step = k;
        rec.seq = static_cast<std::uint32_t>(k);

        // PLC actuation scan: commands refresh every hold_steps and are held
        // in between, so the actuator stream is piecewise constant
        if (k % cfg.controller.hold_steps == 0)
            u = level_controller(last_decoded, cfg.setpoints, cfg.controller);
        const bool tapped = adversary && k >= calibration_len;
        if (tapped)
            adversary->observe_command(u);

        x = step(x, u, cfg.plant, noise.process());
        rec.x_true = x.levels;
        rec.y_plain = measure(x, noise.measurement());

        predict(ekf, plant_transition(u, cfg.plant), cfg.noise.Q);

        const Packet sent = encode(std::span<const double>(rec.y_plain.data(), 3), rec.seq, cfg.channel);
        const Interceptor tap =
            tapped ? Interceptor([&](const Packet& p) { return adversary->intercept(p); })
                   : Interceptor(nullptr);
        const std::optional<Packet> wire = channel.transmit(sent, tap);

        rec.adversary_action = tapped && wire ? adversary->last_action() : "none";
        std::string verdict;
        if (!wire) {
            verdict = "lost";
        } else {
            rec.payload_coded = wire->payload;
            const ReceiveResult rx = receiver.receive(*wire);
            switch (rx.verdict) {
            case ReceiveVerdict::accepted: {
                rec.delivered = true;
                verdict = "delivered";
                Eigen::Vector3d y_dec(rx.y->at(0), rx.y->at(1), rx.y->at(2));
                rec.y_decoded = y_dec;

                const Eigen::Vector3d innovation = y_dec - Eigen::Vector3d(ekf.xhat);
                rec.gate_accepted = gate(ekf, y_dec, cfg.noise.R, cfg.ekf.chi2_threshold);
                if (rec.gate_accepted)
                    update(ekf, y_dec, cfg.noise.R);
                // on rejection the detector still sees the measurement,
                // evaluated against the prediction
                rec.residual = cfg.ekf.residual_mode == ResidualMode::posterior && rec.gate_accepted
                                   ? Eigen::Vector3d(residual(y_dec, ekf))
                                   : innovation;
                last_decoded = y_dec;
                break;
            }
            case ReceiveVerdict::crc_mismatch:
                verdict = "crc_reject";
                break;
            case ReceiveVerdict::stale_seq:
                verdict = "stale_reject";
                break;
            }
        }
        if (tapped && wire && rec.adversary_action != "none" && rec.adversary_action != "idle")
            verdict += "/" + rec.adversary_action;
        log.packet_log.push_back(packet_log_line(k, "s2m", wire ? *wire : sent, verdict));

        if (rec.delivered) {
            loss_streak = 0;
        } else {
            if (++loss_streak == cfg.max_consecutive_losses)
                ++log.summary.missing_data_alarms;
        }

        if (k < calibration_len) {
            if (rec.residual)
                calibration_history.push_back(*rec.residual);
            if (k + 1 == calibration_len)
                thresholds = preset_thresholds ? *preset_thresholds
                                               : calibrate(calibration_history, cfg.margin);
        } else if (rec.residual) {
            rec.decision = decide(*rec.residual, *thresholds);
            const std::optional<std::size_t> adv_onset =
                adversary ? adversary->onset_step() : std::nullopt;
            const bool before_onset = !adv_onset || k < calibration_len + *adv_onset;
            if (before_onset) {
                ++decided_before_onset;
                if (rec.decision->hypothesis == Hypothesis::under_attack)
                    ++decided_h1_before_onset;
            }
        }

        rec.xhat = ekf.xhat;
        log.records.push_back(std::move(rec));
    }

    RunSummary& summary = log.summary;
    if (thresholds)
        summary.thresholds = *thresholds;
    if (adversary && adversary->onset_step())
        summary.onset = calibration_len + *adversary->onset_step();
    for (const auto& rec : log.records)
        if (rec.decision && rec.decision->hypothesis == Hypothesis::under_attack)
            ++summary.alarms;
    summary.dropped_packets = 0;
    for (const auto& rec : log.records)
        if (!rec.delivered)
            ++summary.dropped_packets;
    if (summary.onset) {
        for (const auto& rec : log.records) {
            if (rec.step >= *summary.onset && rec.decision &&
                rec.decision->hypothesis == Hypothesis::under_attack) {
                summary.detection_delay = rec.step - *summary.onset;
                break;
            }
        }
    }
    summary.false_alarm_rate =
        decided_before_onset == 0
            ? 0.0
            : static_cast<double>(decided_h1_before_onset) / static_cast<double>(decided_before_onset);
    return log;
}

std::string vec_cell(const std::optional<Eigen::Vector3d>& v, int i) {
    return v ? format_double((*v)(i)) : "nan";
}

std::string decision_cell(const std::optional<Decision>& d) {
    if (!d)
        return "none";
    return d->hypothesis == Hypothesis::under_attack ? "H1" : "H0";
}

} // namespace

RunLog run_scenario(const ScenarioConfig& cfg,
                    const std::optional<ThresholdVector>& preset_thresholds) {
    return run_loop(cfg, cfg.horizon, true, preset_thresholds);
}

RunLog run_calibration_only(const ScenarioConfig& cfg) {
    RunLog log = run_loop(cfg, cfg.calibration_len, false, std::nullopt);
    return log;
}

void emit_csv(const RunLog& log, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    const auto run_path = dir / "run.csv";
    std::ofstream out(run_path);
    if (!out)
        throw IoError("cannot write " + run_path.string());
    out << "step,x1,x2,x3,y1,y2,y3,r1,r2,r3,beta1,beta2,beta3,decision,adversary_action,seq,"
           "delivered\n";
    const Eigen::VectorXd& beta = log.summary.thresholds.beta;
    const bool have_beta = beta.size() == 3;
    for (const auto& rec : log.records) {
        out << rec.step;
        for (int i = 0; i < 3; ++i)
            out << ',' << format_double(rec.x_true(i));
        for (int i = 0; i < 3; ++i)
            out << ',' << vec_cell(rec.y_decoded, i);
        for (int i = 0; i < 3; ++i)
            out << ',' << vec_cell(rec.residual, i);
        for (int i = 0; i < 3; ++i)
            out << ',' << (have_beta ? format_double(beta(i)) : std::string("nan"));
        out << ',' << decision_cell(rec.decision) << ',' << rec.adversary_action << ',' << rec.seq
            << ',' << (rec.delivered ? 1 : 0) << '\n';
    }
    if (!out)
        throw IoError("failed writing " + run_path.string());

    const auto summary_path = dir / "summary.csv";
    std::ofstream sum(summary_path);
    if (!sum)
        throw IoError("cannot write " + summary_path.string());
    const auto& s = log.summary;
    sum << "key,value\n";
    sum << "alarms," << s.alarms << '\n';
    sum << "detection_delay," << (s.detection_delay ? std::to_string(*s.detection_delay) : "none")
        << '\n';
    sum << "false_alarm_rate," << format_double(s.false_alarm_rate) << '\n';
    sum << "dropped_packets," << s.dropped_packets << '\n';
    sum << "missing_data_alarms," << s.missing_data_alarms << '\n';
    sum << "onset," << (s.onset ? std::to_string(*s.onset) : "none") << '\n';
    if (!sum)
        throw IoError("failed writing " + summary_path.string());
}

void emit_packets_csv(const RunLog& log, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = dir / "packets.csv";
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << packet_log_header() << '\n';
    for (const auto& line : log.packet_log)
        out << line << '\n';
    if (!out)
        throw IoError("failed writing " + path.string());
}

void emit_plot_data(const RunLog& log, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    {
        std::ofstream out(dir / "residuals.dat");
        if (!out)
            throw IoError("cannot write residuals.dat");
        out << "# step r1 r2 r3\n";
        for (const auto& rec : log.records) {
            if (!rec.residual)
                continue;
            out << rec.step;
            for (int i = 0; i < 3; ++i)
                out << ' ' << format_double((*rec.residual)(i));
            out << '\n';
        }
    }
    {
        std::ofstream out(dir / "thresholds.dat");
        if (!out)
            throw IoError("cannot write thresholds.dat");
        out << "# step beta1 beta2 beta3\n";
        const Eigen::VectorXd& beta = log.summary.thresholds.beta;
        const std::size_t last = log.records.empty() ? 0 : log.records.back().step;
        for (const std::size_t step : {std::size_t{0}, last}) {
            out << step;
            for (int i = 0; i < 3 && i < beta.size(); ++i)
                out << ' ' << format_double(beta(i));
            out << '\n';
        }
    }
    {
        std::ofstream out(dir / "onset.dat");
        if (!out)
            throw IoError("cannot write onset.dat");
        out << "# onset step\n";
        if (log.summary.onset)
            out << *log.summary.onset << '\n';
    }
    {
        std::ofstream out(dir / "plot.gp");
        if (!out)
            throw IoError("cannot write plot.gp");
        out << "# gnuplot script: per-tank residuals against the calibrated thresholds\n"
               "set terminal pngcairo size 1200,900\n"
               "set output 'residuals.png'\n"
               "set multiplot layout 3,1\n"
               "set xlabel 'step'\n";
        if (log.summary.onset)
            out << "onset = " << *log.summary.onset << "\n";
        for (int i = 0; i < 3; ++i) {
            out << "set ylabel 'tank " << (i + 1) << " residual [m]'\n";
            if (log.summary.onset)
                out << "set arrow " << (i + 1)
                    << " from onset, graph 0 to onset, graph 1 nohead dashtype 2\n";
            out << "plot 'residuals.dat' using 1:" << (i + 2)
                << " with lines title 'residual', \\\n"
                   "     'thresholds.dat' using 1:"
                << (i + 2)
                << " with lines title 'beta', \\\n"
                   "     'thresholds.dat' using 1:($"
                << (i + 2) << "*(-1)) with lines title '-beta'\n";
        }
        out << "unset multiplot\n";
    }
}

std::vector<RunCsvRow> parse_run_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot read " + file.string());
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty csv: " + file.string());
    std::vector<RunCsvRow> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 17)
            throw IoError("run.csv row does not have 17 columns");
        RunCsvRow row;
        row.step = parse_u64(cells[0]);
        const auto num = [](const std::string& c) {
            return c == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_double(c);
        };
        for (int i = 0; i < 3; ++i) {
            row.x_true(i) = num(cells[static_cast<std::size_t>(1 + i)]);
            row.y_decoded(i) = num(cells[static_cast<std::size_t>(4 + i)]);
            row.residual(i) = num(cells[static_cast<std::size_t>(7 + i)]);
            row.beta(i) = num(cells[static_cast<std::size_t>(10 + i)]);
        }
        row.decision = cells[13];
        row.adversary_action = cells[14];
        row.seq = static_cast<std::uint32_t>(parse_u64(cells[15]));
        row.delivered = cells[16] == "1";
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace hydra
