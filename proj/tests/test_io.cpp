#include "oracles.hpp"

#include "mhawkes/errors.hpp"
#include "mhawkes/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <limits>
#include <sstream>

using namespace mhawkes;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mhawkes_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::size_t error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        (void)read_stream_csv(in, 100.0);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("stream CSV round trip is exact", "[io]") {
    const auto s = oracle::random_stream(2000, 19800.0, 4, 6);
    std::stringstream buf;
    write_stream_csv(buf, s);
    CHECK(buf.str().rfind("time,direction,mark\n", 0) == 0);
    const auto back = read_stream_csv(buf, s.horizon);
    CHECK(back == s);
}

TEST_CASE("stream CSV errors", "[io]") {
    CHECK(error_line("t,d,m\n") == 1);
    CHECK(error_line("time,direction,mark\n1.0,up,1\n2.0,sideways,1\n") == 3);
    CHECK(error_line("time,direction,mark\n1.0,up\n") == 2);
    CHECK(error_line("time,direction,mark\nx,up,1\n") == 2);
    CHECK(error_line("time,direction,mark\n1.0,up,1.5\n") == 2);
    std::istringstream unordered("time,direction,mark\n2.0,up,1\n1.0,down,1\n");
    CHECK_THROWS_AS(read_stream_csv(unordered, 10.0), DataIntegrityError);
}

TEST_CASE("saved streams keep horizon and initial intensity", "[io]") {
    auto s = oracle::random_stream(100, 50.0, 8);
    const auto file = scratch("plain.csv");
    save_stream(file, s);
    CHECK(load_stream(file) == s);

    s.initial_intensity = IntensityState{0.25, 0.75};
    save_stream(file, s);
    CHECK(load_stream(file) == s);

    fs::remove(file.string() + ".json");
    CHECK_THROWS_AS(load_stream(file), InvalidParameter);
    const auto explicit_horizon = load_stream(file, 50.0);
    CHECK(explicit_horizon.events == s.events);
    CHECK_THROWS_AS(load_stream(scratch("missing.csv"), 1.0), InvalidParameter);
}

TEST_CASE("parameter JSON round trip", "[io]") {
    const SymmetricParams p{0.15, 0.62, 0.5, 1.9, 0.22};
    CHECK(symmetric_from_json(to_json(p)) == p);
    const FullParams f{0.1461, 0.1155, 0.3185, 0.3821, 0.9812, 1.4949, 1.1799, 1.9553, 2.0952, 2.5030, 0.1488};
    CHECK(full_from_json(to_json(f)) == f);

    const auto partial = symmetric_from_json(Json{{"beta", 3.0}}, p);
    CHECK(partial.beta == 3.0);
    CHECK(partial.mu == p.mu);
}

TEST_CASE("non-finite numbers serialize as null", "[io]") {
    FitResult<SymmetricParams> r;
    r.params = {0.15, 0.62, 0.5, 1.9, 0.22};
    r.std_errors = {std::numeric_limits<double>::quiet_NaN(), 0.01, 0.01, 0.04, 0.05};
    r.mean_mark = 1.2;
    const Json j = to_json(r);
    CHECK(j["stderr"]["mu"].is_null());
    CHECK(j["model"] == "symmetric");
    CHECK(j["q_s"].get<double>() == Catch::Approx(0.62 / 1.9 * 1.044));
    const auto back = symmetric_from_json(j["stderr"], SymmetricParams{9, 9, 9, 9, 9});
    CHECK(back.mu == 9.0);
}
