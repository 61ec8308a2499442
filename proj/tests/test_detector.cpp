#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "hydra/detector.hpp"

using hydra::Decision;
using hydra::Hypothesis;
using hydra::ThresholdVector;

namespace {

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

} // namespace

TEST_CASE("calibrate takes the componentwise max of absolute residuals") {
    SUBCASE("all-zero history gives zero thresholds") {
        const auto tv = hydra::calibrate({vec3(0, 0, 0), vec3(0, 0, 0)});
        CHECK(tv.beta == vec3(0, 0, 0));
        CHECK(tv.calibration_len == 2);
    }
    SUBCASE("plain max per component") {
        const auto tv = hydra::calibrate({vec3(0.1, 0, 0), vec3(0.3, 0, 0), vec3(0.2, 0, 0)});
        CHECK(tv.beta(0) == 0.3);
    }
    SUBCASE("negative excursions count through the absolute value") {
        const auto tv = hydra::calibrate({vec3(0, -0.5, 0), vec3(0, 0.2, 0)});
        CHECK(tv.beta(1) == 0.5);
    }
    SUBCASE("margin scales the result") {
        const auto tv = hydra::calibrate({vec3(0.1, 0.2, 0.3)}, 1.2);
        CHECK(tv.beta.isApprox(vec3(0.12, 0.24, 0.36)));
        CHECK(tv.margin == 1.2);
    }
    SUBCASE("empty history is an error") {
        CHECK_THROWS_AS(hydra::calibrate({}), hydra::CalibrationError);
    }
}

TEST_CASE("decide uses strict exceedance with any-component semantics") {
    ThresholdVector tv;
    tv.beta = vec3(0.3, 0.3, 0.3);

    CHECK(hydra::decide(vec3(0, 0, 0), tv).hypothesis == Hypothesis::healthy);

    // exact equality stays healthy: H0 holds when r <= beta
    CHECK(hydra::decide(vec3(0.3, 0.3, 0.3), tv).hypothesis == Hypothesis::healthy);

    const auto d = hydra::decide(vec3(0.0, 0.31, 0.0), tv);
    CHECK(d.hypothesis == Hypothesis::under_attack);
    CHECK(d.violated_components == std::vector<int>{1});

    const auto both = hydra::decide(vec3(-0.4, 0.0, 0.5), tv);
    CHECK(both.violated_components == std::vector<int>{0, 2});
}

TEST_CASE("in-sample soundness: calibration history never alarms at margin 1") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::VectorXd> hist;
    for (int i = 0; i < 500; ++i)
        hist.push_back(vec3(u(rng), u(rng), u(rng)));
    const auto tv = hydra::calibrate(hist, 1.0);
    for (const auto& r : hist)
        CHECK(hydra::decide(r, tv).hypothesis == Hypothesis::healthy);
}

TEST_CASE("decide is monotone and scale-invariant") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    ThresholdVector tv;
    tv.beta = vec3(0.4, 0.2, 0.7);
    for (int i = 0; i < 2000; ++i) {
        const auto r = vec3(u(rng), u(rng), u(rng));
        const auto d = hydra::decide(r, tv);

        // growing any |r_i| never flips H1 back to H0
        Eigen::VectorXd grown = r * 1.5;
        if (d.hypothesis == Hypothesis::under_attack)
            CHECK(hydra::decide(grown, tv).hypothesis == Hypothesis::under_attack);

        // common positive scaling of r and beta changes nothing
        const double s = scale(rng);
        ThresholdVector scaled;
        scaled.beta = tv.beta * s;
        CHECK(hydra::decide(r * s, scaled).hypothesis == d.hypothesis);
        CHECK(hydra::decide(r * s, scaled).violated_components == d.violated_components);
    }
}

TEST_CASE("alarm_stream yields one event per H1 step and the detection delay") {
    std::vector<Decision> decisions(10);
    CHECK(hydra::alarm_stream(decisions).events.empty());

    decisions[3] = Decision{Hypothesis::under_attack, {0}};
    decisions[7] = Decision{Hypothesis::under_attack, {1, 2}};

    const auto summary = hydra::alarm_stream(decisions, 500, 502);
    REQUIRE(summary.events.size() == 2);
    CHECK(summary.events[0].step == 503);
    CHECK(summary.events[0].violated_components == std::vector<int>{0});
    CHECK(summary.events[1].step == 507);
    REQUIRE(summary.detection_delay.has_value());
    CHECK(*summary.detection_delay == 1);

    // events before the onset do not count as detection
    const auto late = hydra::alarm_stream(decisions, 500, 505);
    REQUIRE(late.detection_delay.has_value());
    CHECK(*late.detection_delay == 2);

    const auto none = hydra::alarm_stream(decisions, 500, 508);
    CHECK_FALSE(none.detection_delay.has_value());
}

TEST_CASE("threshold files round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "hydra_detector_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "thresholds.txt";

    ThresholdVector tv;
    tv.beta = vec3(0.0123456789012345, 7.5e-3, 1e-9);
    tv.calibration_len = 1000;
    tv.margin = 1.2;
    hydra::save_thresholds(path, tv);

    const auto loaded = hydra::load_thresholds(path);
    CHECK(loaded.beta == tv.beta); // bit-exact through shortest round-trip formatting
    CHECK(loaded.calibration_len == 1000);
    CHECK(loaded.margin == 1.2);

    CHECK_THROWS_AS(hydra::load_thresholds(dir / "missing.txt"), hydra::IoError);
    std::filesystem::remove_all(dir);
}
