// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; the oracles
// (dense-matrix arithmetic, exact integer recursion, textbook scalar filter,
// hand-derived Jacobians) are reimplemented here, independent of the library
// paths they check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "hydra/config.hpp"
#include "hydra/detector.hpp"
#include "hydra/ekf.hpp"
#include "hydra/keystream.hpp"
#include "hydra/plant.hpp"
#include "hydra/rng.hpp"
#include "hydra/scenario.hpp"
#include "hydra/signed_permutation.hpp"

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            detail = msg;
        }
    }
};

// ---- oracles ---------------------------------------------------------------

using Matrix = std::vector<std::vector<int>>;

Matrix to_matrix(const hydra::SignedPermutation& sp) {
    const int n = sp.size();
    Matrix m(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i)
        m[i][sp.perm(i)] = sp.sign(i);
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    const auto n = a.size();
    Matrix c(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                c[i][j] += a[i][k] * b[k][j];
    return c;
}

std::uint64_t fib_exact(std::uint32_t p, std::int64_t n) {
    if (n < 0)
        return 0;
    std::vector<std::uint64_t> f(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) {
        if (k == 0) {
            f[0] = 1;
            continue;
        }
        const std::int64_t back = k - 1 - p;
        f[static_cast<std::size_t>(k)] =
            f[static_cast<std::size_t>(k - 1)] + (back < 0 ? 0 : f[static_cast<std::size_t>(back)]);
    }
    return f[static_cast<std::size_t>(n)];
}

std::uint64_t period_brute_force(std::uint32_t p, std::uint64_t m) {
    const std::size_t width = p + 1;
    std::vector<std::uint64_t> initial(width), state(width);
    for (std::size_t i = 0; i < width; ++i)
        initial[i] = fib_exact(p, static_cast<std::int64_t>(i)) % m;
    state = initial;
    for (std::uint64_t step = 1; step <= 1000000; ++step) {
        const std::uint64_t next = (state[width - 1] + state[0]) % m;
        state.erase(state.begin());
        state.push_back(next);
        if (state == initial)
            return step;
    }
    return 0;
}

hydra::PlantParams stock_params() {
    return hydra::default_scenario_config().plant;
}

Eigen::Matrix3d analytic_jacobian(const Eigen::Vector3d& x, const hydra::ActuatorInput& u,
                                  const hydra::PlantParams& p) {
    const double root2g = std::sqrt(2.0 * p.gravity);
    const double dq12 = p.pipe_area * u.valve12 * root2g / (2.0 * std::sqrt(x(0)));
    const double dp2 = p.pump2_gain * p.pipe_area * root2g / (2.0 * std::sqrt(x(2)));
    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    jac(0, 0) = -dq12;
    jac(0, 2) = dp2;
    jac(1, 0) = dq12;
    jac(2, 2) = -dp2;
    if (x(1) > p.connect_height && x(2) > p.connect_height && x(1) != x(2)) {
        const double dq23 =
            p.pipe_area * u.valve23 * root2g / (2.0 * std::sqrt(std::abs(x(1) - x(2))));
        jac(1, 1) -= dq23;
        jac(1, 2) += dq23;
        jac(2, 1) += dq23;
        jac(2, 2) -= dq23;
    } else if (x(1) > p.connect_height && x(2) < p.connect_height) {
        const double dq23h =
            p.pipe_area * u.valve23 * root2g / (2.0 * std::sqrt(x(1) - p.connect_height));
        jac(1, 1) -= dq23h;
        jac(2, 1) += dq23h;
    }
    return Eigen::Matrix3d::Identity() + p.dt * jac / p.tank_area;
}

hydra::ScenarioConfig seeded_default(std::uint64_t seed) {
    hydra::ScenarioConfig cfg = hydra::default_scenario_config();
    cfg.noise.rng_seed = seed;
    cfg.channel.rng_seed = seed + 1;
    return cfg;
}

bool bits_equal3(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return std::memcmp(a.data(), b.data(), 3 * sizeof(double)) == 0;
}

// ---- criteria --------------------------------------------------------------

void criterion_codebook(Checker& c) {
    std::set<Matrix> seen;
    std::vector<hydra::SignedPermutation> all;
    for (std::uint64_t i = 0; i < 48; ++i) {
        all.push_back(hydra::unrank(i, 3));
        seen.insert(to_matrix(all.back()));
        c.require(hydra::rank(all[i]) == i, "rank(unrank(i)) != i at " + std::to_string(i));
    }
    c.require(seen.size() == 48, "enumeration yielded fewer than 48 distinct matrices");
    c.require(hydra::codebook_size(3) == 48, "codebook_size(3) != 48");

    const auto id = hydra::SignedPermutation::identity(3);
    for (const auto& sp : all) {
        c.require(hydra::compose(sp, sp.inverse()) == id, "inverse law failed");
        c.require(hydra::compose(id, sp) == sp, "identity law failed");
        c.require(seen.count(to_matrix(hydra::compose(sp, all[7]))) == 1, "closure failed");
    }
    std::mt19937_64 rng(424242);
    for (int t = 0; t < 10000; ++t) {
        const auto a = hydra::unrank(rng() % 48, 3);
        const auto b = hydra::unrank(rng() % 48, 3);
        const auto d = hydra::unrank(rng() % 48, 3);
        const auto left = hydra::compose(hydra::compose(a, b), d);
        const auto right = hydra::compose(a, hydra::compose(b, d));
        c.require(left == right, "associativity failed on a sampled triple");
        c.require(to_matrix(left) == matmul(matmul(to_matrix(a), to_matrix(b)), to_matrix(d)),
                  "composition disagrees with dense-matrix product");
    }
}

void criterion_bit_exact(Checker& c) {
    hydra::ChannelConfig cfg;
    cfg.coding_enabled = true;
    cfg.key = {1, 7};

    const std::vector<double> specials = {
        0.0, -0.0, 5e-324, -5e-324, 2.2250738585072014e-308, 1.7976931348623157e308,
        -1.7976931348623157e308, 4.9406564584124654e-315, 1.5, -1e-300, 1e300,
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::quiet_NaN()};

    std::mt19937_64 rng(99991);
    for (int t = 0; t < 100000; ++t) {
        std::vector<double> y(3);
        for (auto& v : y)
            v = std::bit_cast<double>(rng());
        if (t % 3 == 0)
            y[t % 2] = specials[static_cast<std::size_t>(t / 3) % specials.size()];
        const auto seq = static_cast<std::uint32_t>(rng() % 4096);
        const hydra::Packet pkt = hydra::encode(y, seq, cfg);
        const auto back = hydra::decode(pkt, cfg);
        c.require(std::memcmp(back.data(), y.data(), 3 * sizeof(double)) == 0,
                  "round trip not bit-identical at trial " + std::to_string(t));
    }
    for (int t = 0; t < 50; ++t) { // large sequence numbers
        std::vector<double> y = {specials[static_cast<std::size_t>(t) % specials.size()],
                                 std::bit_cast<double>(rng()), -0.0};
        const auto seq = static_cast<std::uint32_t>(rng() % 1000000);
        const auto back = hydra::decode(hydra::encode(y, seq, cfg), cfg);
        c.require(std::memcmp(back.data(), y.data(), 3 * sizeof(double)) == 0,
                  "round trip not bit-identical at a large seq");
    }
}

void criterion_keystream(Checker& c) {
    for (std::uint32_t p = 0; p <= 4; ++p)
        for (std::int64_t n = 0; n <= 60; ++n)
            for (std::uint64_t m = 2; m <= 100; ++m)
                c.require(hydra::fib_p_mod(p, n, m) == fib_exact(p, n) % m,
                          "fib_p_mod mismatch at p=" + std::to_string(p) +
                              " n=" + std::to_string(n) + " m=" + std::to_string(m));
    c.require(hydra::fib_p_period(1, 3) == 8, "period(1,3) != 8");
    c.require(hydra::fib_p_period(1, 2) == 3, "period(1,2) != 3");
    c.require(hydra::fib_p_period(2, 2) == 7, "period(2,2) != 7");
    c.require(period_brute_force(1, 3) == 8 && period_brute_force(1, 2) == 3 &&
                  period_brute_force(2, 2) == 7,
              "brute-force period oracle disagrees");
}

void criterion_estimator(Checker& c) {
    // scalar filter vs textbook recursion, pinned at 1e-9
    {
        const double a = 0.9, q = 1e-4, r = 4e-3;
        auto f = [a](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-0.1, 0.1);
        hydra::EkfState ekf;
        ekf.xhat = Eigen::VectorXd::Constant(1, 1.0);
        ekf.P = Eigen::MatrixXd::Constant(1, 1, 0.5);
        double xo = 1.0, po = 0.5, truth = 1.0, worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            truth *= a;
            const double y = truth + u(rng);
            hydra::predict(ekf, f, Eigen::MatrixXd::Constant(1, 1, q));
            po = a * a * po + q;
            xo = a * xo;
            hydra::update(ekf, Eigen::VectorXd::Constant(1, y),
                          Eigen::MatrixXd::Constant(1, 1, r));
            const double gain = po / (po + r);
            xo += gain * (y - xo);
            po *= (1.0 - gain);
            worst = std::max({worst, std::abs(ekf.xhat(0) - xo), std::abs(ekf.P(0, 0) - po)});
        }
        c.require(worst < 1e-9, "scalar filter deviates from textbook by " + std::to_string(worst));
    }

    // finite-difference vs hand-derived Jacobian at 5 smooth points, 1e-5
    {
        const auto p = stock_params();
        const std::vector<std::pair<Eigen::Vector3d, hydra::ActuatorInput>> points = {
            {{0.30, 0.20, 0.10}, {0.5, 0.5}}, {{0.16, 0.30, 0.24}, {0.8, 0.4}},
            {{0.25, 0.12, 0.40}, {0.3, 0.9}}, {{0.50, 0.35, 0.30}, {1.0, 1.0}},
            {{0.10, 0.22, 0.02}, {0.6, 0.7}}};
        for (const auto& [x, u] : points) {
            const double err =
                (hydra::jacobian_f(x, u, p) - analytic_jacobian(x, u, p)).cwiseAbs().maxCoeff();
            c.require(err < 1e-5, "Jacobian error " + std::to_string(err));
        }
    }

    // noise-free convergence from a 20% perturbed start, within 200 steps
    {
        const auto p = stock_params();
        const Eigen::Matrix3d qf = Eigen::Matrix3d::Identity() * 3e-6;
        const Eigen::Matrix3d rf = Eigen::Matrix3d::Identity() * 1e-5;
        hydra::TankState x;
        x.levels << 0.20, 0.15, 0.10;
        hydra::EkfState ekf;
        ekf.xhat = x.levels * 1.2;
        ekf.P = Eigen::Matrix3d::Identity() * 4e-4;
        bool converged = false;
        for (int k = 0; k < 200 && !converged; ++k) {
            const auto u = hydra::level_controller(x.levels, Eigen::Vector3d(0.05, 0.05, 0.05),
                                                   {4.0, 0.005});
            x = hydra::step(x, u, p);
            hydra::predict(ekf, hydra::plant_transition(u, p), qf);
            const Eigen::Vector3d y = hydra::measure(x);
            if (hydra::gate(ekf, y, rf, 11.345))
                hydra::update(ekf, y, rf);
            converged = (Eigen::Vector3d(ekf.xhat) - x.levels).norm() < 1e-3;
        }
        c.require(converged, "estimate did not reach 1e-3 m within 200 steps");
    }

    // P stays PSD (min eigenvalue >= -1e-10) through a noisy 5000-step run
    {
        const auto cfg = seeded_default(3);
        const auto p = cfg.plant;
        hydra::NoiseSource noise(cfg.noise);
        hydra::TankState x;
        x.levels = cfg.x0;
        hydra::EkfState ekf;
        ekf.xhat = cfg.x0 * 1.2;
        ekf.P = Eigen::Matrix3d::Identity() * cfg.ekf.p0;
        double min_eig = 0.0;
        for (int k = 0; k < 5000; ++k) {
            const auto u = hydra::level_controller(Eigen::Vector3d(ekf.xhat), cfg.setpoints,
                                                   cfg.controller);
            x = hydra::step(x, u, p, noise.process());
            hydra::predict(ekf, hydra::plant_transition(u, p), cfg.noise.Q);
            const Eigen::Vector3d y = hydra::measure(x, noise.measurement());
            if (hydra::gate(ekf, y, cfg.noise.R, cfg.ekf.chi2_threshold))
                hydra::update(ekf, y, cfg.noise.R);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(ekf.P);
            min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
        }
        c.require(min_eig >= -1e-10, "P lost positive semi-definiteness");
    }
}

void criterion_detector_soundness(Checker& c) {
    // margin 1.0: in-sample soundness by construction
    {
        hydra::ScenarioConfig cfg = seeded_default(1);
        cfg.margin = 1.0;
        const hydra::RunLog log = hydra::run_scenario(cfg);
        for (const auto& rec : log.records) {
            if (rec.step >= cfg.calibration_len || !rec.residual)
                continue;
            const auto d = hydra::decide(*rec.residual, log.summary.thresholds);
            c.require(d.hypothesis == hydra::Hypothesis::healthy,
                      "margin-1.0 thresholds alarm inside their own calibration window");
        }
    }
    // margin 1.2: zero alarms over fresh healthy 5000-step runs, 20 seeds
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        hydra::ScenarioConfig cfg = seeded_default(seed);
        const hydra::RunLog log = hydra::run_scenario(cfg);
        c.require(log.summary.alarms == 0,
                  "seed " + std::to_string(seed) + " raised " +
                      std::to_string(log.summary.alarms) + " false alarms");
    }
}

void criterion_stealth_baseline(Checker& c) {
    int clean = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        hydra::ScenarioConfig cfg = seeded_default(seed);
        cfg.attack.mode = hydra::AttackMode::replay_payload;
        cfg.channel.coding_enabled = false;
        const hydra::RunLog log = hydra::run_scenario(cfg);
        c.require(log.summary.onset.has_value(),
                  "seed " + std::to_string(seed) + ": attack never started");
        if (log.summary.onset && log.summary.alarms == 0)
            ++clean;
    }
    c.require(clean >= 19, "uncoded replay alarmed in " + std::to_string(20 - clean) +
                               " of 20 runs (needs >= 19 stealthy)");
}

void criterion_coded_detection(Checker& c) {
    int all_components_fast = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        hydra::ScenarioConfig cfg = seeded_default(seed);
        cfg.attack.mode = hydra::AttackMode::replay_payload;
        cfg.channel.coding_enabled = true;
        const hydra::RunLog log = hydra::run_scenario(cfg);
        c.require(log.summary.onset.has_value(),
                  "seed " + std::to_string(seed) + ": attack never started");
        if (!log.summary.onset)
            continue;
        c.require(log.summary.detection_delay.has_value(),
                  "seed " + std::to_string(seed) + ": coded replay was never detected");
        if (log.summary.detection_delay) {
            c.require(*log.summary.detection_delay <= 2,
                      "seed " + std::to_string(seed) + ": detection delay " +
                          std::to_string(*log.summary.detection_delay) + " exceeds 2 steps");
        }
        std::set<int> violated;
        for (const auto& rec : log.records) {
            if (rec.step >= *log.summary.onset && rec.step < *log.summary.onset + 10 &&
                rec.decision)
                violated.insert(rec.decision->violated_components.begin(),
                                rec.decision->violated_components.end());
        }
        if (violated.size() == 3)
            ++all_components_fast;
    }
    c.require(all_components_fast >= 19,
              "all three thresholds violated within 10 steps in only " +
                  std::to_string(all_components_fast) + " of 20 runs");
}

void criterion_loss_resilience(Checker& c) {
    hydra::ScenarioConfig lossless = seeded_default(12);
    const hydra::RunLog base = hydra::run_scenario(lossless);

    hydra::ScenarioConfig cfg = seeded_default(12);
    cfg.channel.loss_probability = 0.2;
    const hydra::RunLog log = hydra::run_scenario(cfg);

    std::size_t delivered = 0;
    for (const auto& rec : log.records) {
        if (!rec.y_decoded)
            continue;
        ++delivered;
        c.require(bits_equal3(*rec.y_decoded, rec.y_plain),
                  "decoded measurement differs from the encoded original at step " +
                      std::to_string(rec.step));
    }
    c.require(delivered > 0.7 * static_cast<double>(cfg.horizon), "implausibly few deliveries");
    c.require(log.summary.dropped_packets > 0.1 * static_cast<double>(cfg.horizon),
              "loss model inactive");
    c.require(log.summary.alarms == base.summary.alarms && base.summary.alarms == 0,
              "alarm count changed under packet loss");
}

void criterion_determinism(Checker& c) {
    hydra::ScenarioConfig cfg = seeded_default(8);
    cfg.attack.mode = hydra::AttackMode::replay_payload;
    cfg.channel.loss_probability = 0.05;
    cfg.horizon = 3000;

    const auto render = [&]() {
        const hydra::RunLog log = hydra::run_scenario(cfg);
        std::ostringstream all;
        const auto dir = std::filesystem::temp_directory_path() / "hydra_acceptance_det";
        std::filesystem::remove_all(dir);
        hydra::emit_csv(log, dir);
        hydra::emit_packets_csv(log, dir);
        for (const char* name : {"run.csv", "summary.csv", "packets.csv"}) {
            std::ifstream in(dir / name, std::ios::binary);
            all << in.rdbuf();
        }
        std::filesystem::remove_all(dir);
        return all.str();
    };
    const std::string first = render();
    const std::string second = render();
    c.require(!first.empty() && first == second, "repeated runs emitted different bytes");
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<void(Checker&)> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "codebook: 48 distinct elements, rank/unrank bijection, group laws",
         criterion_codebook},
        {2, "zero quantization error: bit-identical decode(encode) for 1e5 pairs",
         criterion_bit_exact},
        {3, "keystream: exact-recursion equivalence and Wall periods 8/3/7", criterion_keystream},
        {4, "estimator: textbook scalar match, Jacobian accuracy, convergence, PSD",
         criterion_estimator},
        {5, "detector soundness: in-sample zero alarms, 20 clean healthy runs at margin 1.2",
         criterion_detector_soundness},
        {6, "stealth baseline: uncoded replay invisible in >= 19/20 runs",
         criterion_stealth_baseline},
        {7, "coded detection: first alarm within 2 steps (20/20), all tanks within 10 (>= 19/20)",
         criterion_coded_detection},
        {8, "loss resilience: bit-exact decoding and unchanged alarms at 20% loss",
         criterion_loss_resilience},
        {9, "determinism: byte-identical CSV outputs across repeated runs",
         criterion_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Checker c;
        try {
            criterion.body(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        if (c.ok) {
            std::cout << "PASS  " << criterion.id << "  " << criterion.title << "\n";
        } else {
            std::cout << "FAIL  " << criterion.id << "  " << criterion.title << " -- " << c.detail
                      << "\n";
            ++failures;
        }
    }
    std::cout << (failures == 0 ? "all criteria passed" : "criteria failed: ")
              << (failures == 0 ? "" : std::to_string(failures)) << "\n";
    return failures == 0 ? 0 : 1;
}
