#include "oracles.hpp"

#include "mhawkes/errors.hpp"
#include "mhawkes/simulate.hpp"
#include "mhawkes/volatility.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

using namespace mhawkes;

namespace {

const SymmetricParams strong{0.1, 0.95, 0.82, 2.25, 0.19};

} // namespace

TEST_CASE("mark samplers", "[simulate]") {
    Rng rng(1);
    CHECK(sample_mark(ConstantOneMarks{}, 37.0, rng) == 1);

    const ConditionalGeometricMarks geo{0.15, 1.0, 2.0};
    for (int i = 0; i < 1000; ++i) CHECK(sample_mark(geo, 0.0, rng) == 1);

    constexpr int draws = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += sample_mark(geo, 10.0, rng);
    CHECK(std::abs(sum / draws - 2.0) < 0.01);

    const EmpiricalMarks pmf{{0.5, 0.3, 0.2}};
    std::map<int, int> counts;
    for (int i = 0; i < 200000; ++i) ++counts[sample_mark(pmf, 0.0, rng)];
    CHECK(counts.size() == 3);
    CHECK(std::abs(counts[1] / 200000.0 - 0.5) < 0.005);
    CHECK(std::abs(counts[3] / 200000.0 - 0.2) < 0.005);
}

TEST_CASE("sampler validation", "[simulate]") {
    CHECK_NOTHROW(validate(MarkSampler{ConditionalGeometricMarks{0.18, 1.0, 2.2}}));
    CHECK_THROWS_AS(validate(MarkSampler{EmpiricalMarks{{0.5, 0.4}}}), InvalidParameter);
    CHECK_THROWS_AS(validate(MarkSampler{EmpiricalMarks{{}}}), InvalidParameter);
    CHECK_THROWS_AS(validate(MarkSampler{ConditionalGeometricMarks{-0.1, 1.0, 2.0}}), InvalidParameter);
    CHECK_THROWS_AS(validate(MarkSampler{ConditionalGeometricMarks{0.1, 0.9, 2.0}}), InvalidParameter);
    CHECK_THROWS_AS(validate(MarkSampler{ConditionalGeometricMarks{0.1, 1.5, 1.2}}), InvalidParameter);
}

TEST_CASE("pure Poisson counts", "[simulate]") {
    const SymmetricParams p{0.5, 0.0, 0.0, 1.0, 0.0};
    const auto r = simulate_path(Scenario::constant(p, ConstantOneMarks{}, 10000.0), 10000.0, 42);
    CHECK(r.warnings.empty());
    for (Side s : {Side::Up, Side::Down})
        CHECK(std::abs(static_cast<double>(r.stream.count(s)) - 5000.0) < 3.0 * std::sqrt(5000.0));
    CHECK_NOTHROW(r.stream.validate());
}

TEST_CASE("Poisson inter-arrivals are exponential", "[simulate][property]") {
    const SymmetricParams p{0.5, 0.0, 0.0, 1.0, 0.0};
    const auto r = simulate_path(Scenario::constant(p, ConstantOneMarks{}, 100200.0), 100200.0, 7);
    std::vector<double> gaps;
    for (std::size_t i = 1; i < r.stream.size() && gaps.size() < 100000; ++i)
        gaps.push_back(r.stream.events[i].time - r.stream.events[i - 1].time);
    REQUIRE(gaps.size() == 100000);
    // Critical value of the KS statistic at the 1% level.
    CHECK(oracle::ks_exponential(gaps, 2.0 * p.mu) < 1.628 / std::sqrt(100000.0));
}

TEST_CASE("same seed gives the same stream", "[simulate]") {
    const auto sc = Scenario::constant(strong, ConditionalGeometricMarks{0.15, 1.0, 2.0}, 3000.0);
    const auto a = simulate_path(sc, 3000.0, 99);
    const auto b = simulate_path(sc, 3000.0, 99);
    const auto c = simulate_path(sc, 3000.0, 100);
    CHECK(a.stream == b.stream);
    CHECK_FALSE(a.stream == c.stream);
}

TEST_CASE("recorded intensities match the inferred path", "[simulate]") {
    const auto sc = Scenario::constant(strong, ConditionalGeometricMarks{0.15, 1.0, 2.0}, 2000.0);
    for (double burn : {0.0, 50.0}) {
        SimulationOptions opt;
        opt.burn_in = burn;
        const auto r = simulate_path(sc, 2000.0, 5, opt);
        CHECK(r.stream.initial_intensity.has_value() == (burn > 0.0));
        const auto path = infer_intensity(r.stream, strong);
        REQUIRE(path.size() == r.intensity.size());
        for (std::size_t i = 0; i < path.size(); ++i) {
            CHECK(std::abs(path[i].up - r.intensity[i].up) <= 1e-9 * path[i].up);
            CHECK(std::abs(path[i].down - r.intensity[i].down) <= 1e-9 * path[i].down);
        }
    }
}

TEST_CASE("branching: mean count matches the stationary rate", "[simulate][property]") {
    const SymmetricParams p{0.2, 0.6, 0.4, 2.0, 0.0};
    const double T = 500.0;
    const double expected = 2.0 * expected_intensity(p, 1.0) * T;
    SimulationOptions opt;
    opt.burn_in = 100.0;
    const auto sc = Scenario::constant(p, ConstantOneMarks{}, T);
    std::vector<double> counts;
    for (int i = 0; i < 400; ++i)
        counts.push_back(static_cast<double>(simulate_path(sc, T, path_seed(3, i), opt).stream.size()));
    double mean = 0.0, ss = 0.0;
    for (double c : counts) mean += c;
    mean /= static_cast<double>(counts.size());
    for (double c : counts) ss += (c - mean) * (c - mean);
    const double se = std::sqrt(ss / static_cast<double>(counts.size() - 1) / static_cast<double>(counts.size()));
    CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("strongly excited event rate agrees with the stationary fixed point", "[simulate]") {
    const ConditionalGeometricMarks geo{0.15, 1.0, 2.0};
    const double T = 19800.0;
    const auto sc = Scenario::constant(strong, geo, T);
    std::vector<KStatistics> ks;
    double rate = 0.0;
    constexpr int paths = 100;
    for (int i = 0; i < paths; ++i) {
        const auto r = simulate_path(sc, T, path_seed(11, i));
        ks.push_back(estimate_k_statistics(r.stream, r.intensity, T));
        rate += static_cast<double>(r.stream.size()) / (2.0 * T);
    }
    rate /= paths;
    const double K = average(ks).k1();
    CHECK(K > 1.0);
    const double predicted = expected_intensity(strong, K);
    CHECK(std::abs(rate / predicted - 1.0) < 0.05);
}

TEST_CASE("conditional geometric marks follow their intensity", "[simulate][property]") {
    const ConditionalGeometricMarks geo{0.15, 1.0, 2.0};
    const auto r = simulate_path(Scenario::constant(strong, geo, 40000.0), 40000.0, 17);
    // Per unit bin: observed mean mark against the mean of min(d + c lambda, U) over the same events.
    std::map<int, std::pair<double, double>> sums; // bin -> (mark sum, expected sum)
    std::map<int, double> sq;
    std::map<int, int> n;
    for (std::size_t i = 0; i < r.stream.size(); ++i) {
        const auto& e = r.stream.events[i];
        const double l = r.intensity[i].of(e.side);
        const int bin = static_cast<int>(std::ceil(l));
        const double m = std::min(geo.d + geo.c * l, geo.U);
        sums[bin].first += e.mark;
        sums[bin].second += m;
        sq[bin] += m * (m - 1.0); // geometric variance
        ++n[bin];
    }
    int checked = 0;
    for (const auto& [bin, s] : sums) {
        if (n[bin] < 500) continue;
        const double se = std::sqrt(sq[bin]) / n[bin];
        CHECK(std::abs(s.first - s.second) / n[bin] < 4.0 * se + 1e-12);
        ++checked;
    }
    CHECK(checked >= 2);
}

TEST_CASE("nonstationary scenarios warn and may explode", "[simulate]") {
    const SymmetricParams hot{0.1, 1.5, 1.5, 1.0, 0.0};
    SimulationOptions opt;
    opt.blowup_guard = 1e3;
    const auto sc = Scenario::constant(hot, ConstantOneMarks{}, 10000.0);
    try {
        (void)simulate_path(sc, 10000.0, 1, opt);
        FAIL("expected an explosion");
    } catch (const ExplosionError& e) {
        CHECK(e.time_reached() > 0.0);
        CHECK(e.time_reached() < 10000.0);
    }
    const auto mild = simulate_path(Scenario::constant(hot, ConstantOneMarks{}, 1.0), 1.0, 1);
    CHECK_FALSE(mild.warnings.empty());
}

TEST_CASE("scenario duration must match the horizon", "[simulate]") {
    const auto sc = Scenario::constant(strong, ConstantOneMarks{}, 100.0);
    CHECK_THROWS_AS(simulate_path(sc, 200.0, 1), InvalidParameter);
}

TEST_CASE("regime switch changes the event rate", "[simulate]") {
    const SymmetricParams calm{0.1, 0.0, 0.0, 1.0, 0.0};
    const SymmetricParams busy{1.0, 0.0, 0.0, 1.0, 0.0};
    Scenario sc{{Segment{1000.0, busy, ConstantOneMarks{}}, Segment{1000.0, calm, ConstantOneMarks{}}}};
    const auto r = simulate_path(sc, 2000.0, 8);
    const auto first = r.stream.slice(0.0, 1000.0).size();
    const auto second = r.stream.slice(1000.0, 2000.0).size();
    CHECK(std::abs(static_cast<double>(first) - 2000.0) < 4.0 * std::sqrt(2000.0));
    CHECK(std::abs(static_cast<double>(second) - 200.0) < 4.0 * std::sqrt(200.0));
}

TEST_CASE("full model without excitation is two Poisson streams", "[simulate]") {
    const FullParams p{0.3, 0.1, 0, 0, 0, 0, 1, 1, 1, 1, 0};
    const auto r = simulate_full(p, ConstantOneMarks{}, 20000.0, 4);
    CHECK(std::abs(static_cast<double>(r.stream.count(Side::Up)) - 6000.0) < 3.0 * std::sqrt(6000.0));
    CHECK(std::abs(static_cast<double>(r.stream.count(Side::Down)) - 2000.0) < 3.0 * std::sqrt(2000.0));
}

TEST_CASE("tied full model matches the symmetric simulator in rate", "[simulate][oracle]") {
    const SymmetricParams sym{0.15, 0.62, 0.50, 1.90, 0.22};
    const FullParams full = FullParams::from_symmetric(sym);
    const ConditionalGeometricMarks geo{0.18, 1.0, 2.2};
    const double T = 2000.0;
    SimulationOptions opt;
    opt.burn_in = 100.0;
    auto stats = [](const std::vector<double>& xs) {
        double m = 0.0, ss = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        for (double x : xs) ss += (x - m) * (x - m);
        return std::pair{m, ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size())};
    };
    std::vector<double> a, b;
    for (int i = 0; i < 200; ++i) {
        a.push_back(static_cast<double>(
            simulate_path(Scenario::constant(sym, geo, T), T, path_seed(1, i), opt).stream.size()));
        b.push_back(static_cast<double>(simulate_full(full, geo, T, path_seed(2, i), opt).stream.size()));
    }
    const auto [ma, va] = stats(a);
    const auto [mb, vb] = stats(b);
    CHECK(std::abs(ma - mb) < 4.0 * std::sqrt(va + vb));
}

TEST_CASE("full simulator intensities match the inferred path", "[simulate]") {
    const FullParams p{0.1461, 0.1155, 0.3185, 0.3821, 0.9812, 1.4949, 1.1799, 1.9553, 2.0952, 2.5030, 0.1488};
    const auto r = simulate_full(p, ConditionalGeometricMarks{0.1, 1.0, 2.0}, 3000.0, 12);
    const auto path = infer_intensity(r.stream, p);
    REQUIRE(path.size() == r.intensity.size());
    for (std::size_t i = 0; i < path.size(); ++i)
        CHECK(std::abs(path[i].total() - r.intensity[i].total()) <= 1e-9 * path[i].total());
}
