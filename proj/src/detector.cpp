#include "hydra/detector.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hydra/text.hpp"

namespace hydra {

ThresholdVector calibrate(const std::vector<Eigen::VectorXd>& residual_history, double margin) {
    if (residual_history.empty())
        throw CalibrationError("calibrate: empty residual history");
    if (!(margin > 0.0))
        throw CalibrationError("calibrate: margin must be positive");

    Eigen::VectorXd beta = residual_history.front().cwiseAbs();
    for (const auto& r : residual_history) {
        if (r.size() != beta.size())
            throw DimensionError("calibrate: inconsistent residual dimensions");
        beta = beta.cwiseMax(r.cwiseAbs());
    }
    return ThresholdVector{beta * margin, residual_history.size(), margin};
}

Decision decide(const Eigen::VectorXd& r, const ThresholdVector& thresholds) {
    if (r.size() != thresholds.beta.size())
        throw DimensionError("decide: residual and threshold dimensions differ");
    Decision d;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (std::abs(r(i)) > thresholds.beta(i))
            d.violated_components.push_back(static_cast<int>(i));
    }
    d.hypothesis = d.violated_components.empty() ? Hypothesis::healthy : Hypothesis::under_attack;
    return d;
}

AlarmSummary alarm_stream(const std::vector<Decision>& decisions, std::size_t base_step,
                          std::optional<std::size_t> onset) {
    AlarmSummary out;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (decisions[i].hypothesis == Hypothesis::under_attack)
            out.events.push_back({base_step + i, decisions[i].violated_components});
    }
    if (onset) {
        for (const auto& ev : out.events) {
            if (ev.step >= *onset) {
                out.detection_delay = ev.step - *onset;
                break;
            }
        }
    }
    return out;
}

void save_thresholds(const std::filesystem::path& path, const ThresholdVector& thresholds) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write thresholds file: " + path.string());
    out << "margin " << format_double(thresholds.margin) << "\n";
    out << "calibration_len " << thresholds.calibration_len << "\n";
    for (Eigen::Index i = 0; i < thresholds.beta.size(); ++i)
        out << "beta tank" << (i + 1) << " " << format_double(thresholds.beta(i)) << "\n";
    if (!out)
        throw IoError("failed writing thresholds file: " + path.string());
}

ThresholdVector load_thresholds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read thresholds file: " + path.string());
    ThresholdVector tv;
    std::vector<double> betas;
    std::string line;
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (text.empty() || text.front() == '#')
            continue;
        std::istringstream fields{std::string(text)};
        std::string head;
        fields >> head;
        if (head == "margin") {
            std::string v;
            fields >> v;
            tv.margin = parse_double(v);
        } else if (head == "calibration_len") {
            std::string v;
            fields >> v;
            tv.calibration_len = parse_u64(v);
        } else if (head == "beta") {
            std::string name, v;
            fields >> name >> v;
            betas.push_back(parse_double(v));
        } else {
            throw IoError("unknown entry in thresholds file: " + head);
        }
    }
    if (betas.empty())
        throw IoError("thresholds file has no beta entries: " + path.string());
    tv.beta = Eigen::Map<Eigen::VectorXd>(betas.data(), static_cast<Eigen::Index>(betas.size()));
    return tv;
}

} // namespace hydra
