#include "mhawkes/errors.hpp"
#include "mhawkes/simulate.hpp"
#include "mhawkes/tickdata.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace mhawkes;
using Catch::Approx;

namespace {

ParsedQuotes parse(const std::string& text, const SessionConfig& cfg = {}) {
    std::istringstream in(text);
    return parse_quotes(in, cfg);
}

// Events on whole seconds, then spread the way the ingest pipeline does.
EventStream integral_stream(std::uint64_t seed, std::size_t n, double horizon) {
    Rng rng(seed);
    EventStream s;
    s.horizon = horizon;
    double t = 0.0;
    while (s.size() < n) {
        t += std::floor(rng.exponential(0.8));
        if (t >= horizon) break;
        int k = 1;
        while (rng.uniform() < 0.3) ++k;
        s.events.push_back({t, rng.uniform() < 0.5 ? Side::Up : Side::Down, k});
    }
    return subdivide_timestamps(s);
}

} // namespace

TEST_CASE("clock times", "[tickdata]") {
    CHECK(parse_clock("10:00:00") == 36000.0);
    CHECK(parse_clock("15:29:59.250") == Approx(55799.25));
    CHECK(format_clock(36000.0) == "10:00:00");
    CHECK(format_clock(55799.25) == "15:29:59.25");
    CHECK_THROWS_AS(parse_clock("10:61:00"), InvalidParameter);
    CHECK_THROWS_AS(parse_clock("1000"), InvalidParameter);
}

TEST_CASE("quote parsing", "[tickdata]") {
    CHECK(parse("timestamp,bid,ask\n").days.empty());

    const auto q = parse("timestamp,bid,ask\n09:59:59,10.00,10.01\n10:00:00,10.00,10.01\n"
                         "10:00:01,10.01,10.02\n10:00:05,10.01,10.03\n");
    REQUIRE(q.days.size() == 1);
    CHECK(q.days[0].records.size() == 3);
    CHECK(q.outside_session == 1);

    const auto crossed = parse("timestamp,bid,ask\n10:00:00,10.02,10.01\n10:00:01,10.00,10.01\n");
    CHECK(crossed.crossed == 1);
    CHECK(crossed.days[0].records.size() == 1);
}

TEST_CASE("quote parsing errors carry line numbers", "[tickdata]") {
    auto line_of = [](const std::string& text) {
        try {
            (void)parse(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("time,bid,ask\n") == 1);
    CHECK(line_of("timestamp,bid,ask\n10:00:00,10.00,10.01\n10:00:01,abc,10.01\n") == 3);
    CHECK(line_of("timestamp,bid,ask\n10:00:00,10.00\n") == 2);
    CHECK(line_of("timestamp,bid,ask\n10:00:00,10.003,10.01\n") == 2);
    CHECK(line_of("timestamp,bid,ask\n10:00:00,-1.00,10.01\n") == 2);
}

TEST_CASE("multi-day files split into days", "[tickdata]") {
    const auto clock = parse("timestamp,bid,ask\n10:00:00,10.00,10.01\n15:00:00,10.00,10.01\n"
                             "10:00:00,11.00,11.01\n");
    CHECK(clock.days.size() == 2);

    SessionConfig cfg;
    cfg.time_format = TimeFormat::Epoch;
    const auto epoch = parse("timestamp,bid,ask\n36000,10.00,10.01\n122400.5,10.00,10.01\n", cfg);
    REQUIRE(epoch.days.size() == 2);
    CHECK(epoch.days[1].day == 1);
    CHECK(epoch.days[1].records[0].timestamp == Approx(36000.5));
    CHECK_THROWS_AS(parse("timestamp,bid,ask\n122400,10.00,10.01\n36000,10.00,10.01\n", cfg), ParseError);
}

TEST_CASE("mid-price events", "[tickdata]") {
    SessionConfig cfg;
    cfg.subdivide = false;
    // Mids 100.00, 100.005, 100.005, 99.995.
    const std::vector<QuoteRecord> quotes{{36000.0, 99.99, 100.01},
                                          {36001.0, 100.00, 100.01},
                                          {36002.0, 100.00, 100.01},
                                          {36003.0, 99.98, 100.01}};
    const auto s = to_mid_events(quotes, cfg);
    REQUIRE(s.size() == 2);
    CHECK(s.events[0] == MarkedEvent{1.0, Side::Up, 1});
    CHECK(s.events[1] == MarkedEvent{3.0, Side::Down, 2});
    CHECK(s.horizon == 19800.0);

    const std::vector<QuoteRecord> flat(5, QuoteRecord{36000.0, 10.0, 10.01});
    CHECK(to_mid_events(flat, cfg).empty());

    SessionConfig coarse;
    coarse.delta = 0.01;
    CHECK_THROWS_AS(to_mid_events(quotes, coarse), DataIntegrityError);
}

TEST_CASE("timestamp subdivision", "[tickdata]") {
    EventStream s;
    s.horizon = 20.0;
    s.events = {{5.0, Side::Up, 1}, {7.0, Side::Up, 2}, {7.0, Side::Down, 1}, {7.0, Side::Up, 3}, {9.5, Side::Down, 1}};
    const auto out = subdivide_timestamps(s);
    REQUIRE(out.size() == 5);
    CHECK(out.events[0].time == 5.5);
    CHECK(out.events[1].time == 7.25);
    CHECK(out.events[2].time == 7.5);
    CHECK(out.events[3].time == 7.75);
    CHECK(out.events[4].time == 9.5);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(out.events[i].side == s.events[i].side);
        CHECK(out.events[i].mark == s.events[i].mark);
    }
    CHECK_NOTHROW(out.validate());
    CHECK(subdivide_timestamps(out) == out);
}

TEST_CASE("quote synthesis round trip", "[tickdata][oracle]") {
    SessionConfig cfg;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto known = integral_stream(seed, 3000, cfg.close - cfg.open);
        const auto quotes = synthesize_quotes(known, cfg, 50.0);
        for (const auto& q : quotes) CHECK(q.bid < q.ask);
        std::ostringstream csv;
        write_quotes(csv, quotes, TimeFormat::Clock);
        std::istringstream in(csv.str());
        const auto parsed = parse_quotes(in, cfg);
        REQUIRE(parsed.days.size() == 1);
        CHECK(parsed.crossed == 0);
        CHECK(to_mid_events(parsed.days[0].records, cfg) == known);
    }
}

TEST_CASE("mark distribution", "[tickdata]") {
    EventStream s;
    s.horizon = 10.0;
    s.events = {{1.0, Side::Up, 1}, {2.0, Side::Down, 1}, {3.0, Side::Up, 2}, {4.0, Side::Up, 3}};
    const auto d = mark_distribution(s);
    CHECK(d.at(1) == 50.0);
    CHECK(d.at(2) == 25.0);
    CHECK(d.at(3) == 25.0);

    for (auto& e : s.events) e.mark = 1;
    CHECK(mark_distribution(s) == std::map<int, double>{{1, 100.0}});

    EventStream empty;
    CHECK_THROWS_AS(mark_distribution(empty), DegenerateError);

    const auto r = simulate_path(Scenario::constant({0.1, 0.95, 0.82, 2.25, 0.19},
                                                    ConditionalGeometricMarks{0.15, 1.0, 2.0}, 19800.0),
                                 19800.0, 5);
    double total = 0.0;
    for (const auto& [k, pct] : mark_distribution(r.stream)) total += pct;
    CHECK(std::abs(total - 100.0) <= 1e-9);
}

TEST_CASE("proxy intensity", "[tickdata]") {
    const SymmetricParams poisson{0.5, 0.0, 0.0, 1.0, 0.0};
    const auto r = simulate_path(Scenario::constant(poisson, EmpiricalMarks{{0.7, 0.2, 0.1}}, 40000.0), 40000.0, 3);
    const auto table = proxy_intensity(r.stream);
    CHECK(table.excluded > 0);
    for (const auto& e : table.events) CHECK(e.total == e.up + e.down);
    for (const auto& b : table.bins) {
        CHECK(std::abs(b.mean_up - 0.5) < 4.0 * b.se_up);
        CHECK(std::abs(b.mean_down - 0.5) < 4.0 * b.se_down);
    }

    ProxyOptions whole;
    whole.tau = r.stream.horizon;
    whole.edge = EdgePolicy::Clamp;
    const double rate = static_cast<double>(r.stream.size()) / r.stream.horizon;
    for (const auto& e : proxy_intensity(r.stream, whole).events) CHECK(e.total == Approx(rate).epsilon(1e-12));
    whole.side = WindowSide::Leading;
    for (const auto& e : proxy_intensity(r.stream, whole).events) CHECK(e.total == Approx(rate).epsilon(1e-12));
}

TEST_CASE("proxy windows", "[tickdata]") {
    EventStream s;
    s.horizon = 30.0;
    s.events = {{1.0, Side::Up, 1}, {5.0, Side::Down, 1}, {12.0, Side::Up, 1}, {14.0, Side::Up, 2}, {25.0, Side::Down, 1}};
    const auto trailing = proxy_intensity(s);
    REQUIRE(trailing.events.size() == 3);
    CHECK(trailing.excluded == 2);
    // Window [4, 14) before the event at 14: events at 5 and 12.
    CHECK(trailing.events[1].up == Approx(0.1));
    CHECK(trailing.events[1].down == Approx(0.1));

    ProxyOptions lead;
    lead.side = WindowSide::Leading;
    const auto leading = proxy_intensity(s, lead);
    CHECK(leading.excluded == 1);
    // Window (1, 11] after the first event: the event at 5.
    CHECK(leading.events[0].total == Approx(0.1));
}

TEST_CASE("proxy intensity grows with mark size", "[tickdata]") {
    const SymmetricParams p{0.1, 0.95, 0.82, 2.25, 0.19};
    const auto r = simulate_path(Scenario::constant(p, ConditionalGeometricMarks{0.15, 1.0, 2.0}, 200000.0),
                                 200000.0, 9);
    const auto table = proxy_intensity(r.stream);
    std::map<int, double> by_mark;
    for (const auto& b : table.bins)
        if (b.signed_mark > 0 && b.signed_mark <= 3) by_mark[b.signed_mark] = b.mean_total;
    REQUIRE(by_mark.size() == 3);
    CHECK(by_mark[1] < by_mark[2]);
    CHECK(by_mark[2] < by_mark[3]);
}

TEST_CASE("conditional mark means", "[tickdata]") {
    const SymmetricParams p{0.1, 0.95, 0.82, 2.25, 0.19};
    const auto unit = simulate_path(Scenario::constant(p, ConstantOneMarks{}, 20000.0), 20000.0, 2);
    for (const auto& b : conditional_mark_mean(unit.stream, unit.intensity)) CHECK(b.mean_mark == 1.0);

    const ConditionalGeometricMarks geo{0.15, 1.0, 2.0};
    const auto r = simulate_path(Scenario::constant(p, geo, 100000.0), 100000.0, 4);
    const auto bins = conditional_mark_mean(r.stream, r.intensity);
    for (const auto& b : bins) {
        if (b.low_count) continue;
        // Expected mark lies between the sampler means at the bin edges.
        const double lo = std::min(geo.d + geo.c * (b.n - 1), geo.U);
        const double hi = std::min(geo.d + geo.c * b.n, geo.U);
        const double se = std::sqrt(hi * (hi - 1.0) / static_cast<double>(b.count));
        CHECK(b.mean_mark >= lo - 4.0 * se);
        CHECK(b.mean_mark <= hi + 4.0 * se);
    }

    EventStream s;
    s.horizon = 100.0;
    for (int i = 0; i < 50; ++i) s.events.push_back({1.0 + i, Side::Up, 1});
    const std::vector<IntensityState> lam(50, IntensityState{2.5, 0.1});
    const auto flagged = conditional_mark_mean(s, IntensityPath(lam));
    REQUIRE(flagged.size() == 1);
    CHECK(flagged[0].n == 3);
    CHECK(flagged[0].low_count);
}
