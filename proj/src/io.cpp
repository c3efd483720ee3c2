#include "mhawkes/io.hpp"

#include "mhawkes/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace mhawkes {

void write_stream_csv(std::ostream& out, const EventStream& stream) {
    out << "time,direction,mark\n" << std::setprecision(17);
    for (const auto& e : stream.events)
        out << e.time << ',' << (e.side == Side::Up ? "up" : "down") << ',' << e.mark << '\n';
}

EventStream read_stream_csv(std::istream& in, double horizon) {
    EventStream stream;
    stream.horizon = horizon;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != "time,direction,mark") throw ParseError("expected header time,direction,mark", line_no);
            header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
            throw ParseError("expected 3 fields", line_no);
        MarkedEvent e;
        const char* b = line.data();
        if (auto [p, ec] = std::from_chars(b, b + c1, e.time); ec != std::errc() || p != b + c1)
            throw ParseError("bad time", line_no);
        const std::string dir = line.substr(c1 + 1, c2 - c1 - 1);
        if (dir == "up")
            e.side = Side::Up;
        else if (dir == "down")
            e.side = Side::Down;
        else
            throw ParseError("direction must be up or down", line_no);
        const char* m = b + c2 + 1;
        const char* end = b + line.size();
        if (auto [p, ec] = std::from_chars(m, end, e.mark); ec != std::errc() || p != end)
            throw ParseError("bad mark", line_no);
        stream.events.push_back(e);
    }
    stream.validate();
    return stream;
}

void save_stream(const std::filesystem::path& path, const EventStream& stream) {
    {
        std::ofstream out(path);
        if (!out) throw InvalidParameter("cannot write " + path.string());
        write_stream_csv(out, stream);
    }
    Json side;
    side["horizon"] = stream.horizon;
    side["events"] = stream.size();
    if (stream.initial_intensity)
        side["initial_intensity"] = {stream.initial_intensity->up, stream.initial_intensity->down};
    else
        side["initial_intensity"] = nullptr;
    std::ofstream out(path.string() + ".json");
    if (!out) throw InvalidParameter("cannot write sidecar for " + path.string());
    out << std::setw(2) << side << '\n';
}

EventStream load_stream(const std::filesystem::path& path, std::optional<double> horizon) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open " + path.string());
    std::optional<IntensityState> initial;
    const std::filesystem::path sidecar = path.string() + ".json";
    if (!horizon) {
        std::ifstream js(sidecar);
        if (!js) throw InvalidParameter("no horizon: sidecar " + sidecar.string() + " missing");
        Json side;
        try {
            side = Json::parse(js);
        } catch (const nlohmann::json::exception& e) {
            throw DataIntegrityError(sidecar.string() + ": " + e.what());
        }
        horizon = side.at("horizon").get<double>();
        if (side.contains("initial_intensity") && side["initial_intensity"].is_array())
            initial = IntensityState{side["initial_intensity"][0].get<double>(),
                                     side["initial_intensity"][1].get<double>()};
    }
    EventStream stream = read_stream_csv(in, *horizon);
    stream.initial_intensity = initial;
    return stream;
}

namespace {

Json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double number_or(const Json& j, const char* key, double fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    return j[key].get<double>();
}

} // namespace

Json to_json(const SymmetricParams& p) {
    return Json{{"mu", number(p.mu)},           {"alpha_s", number(p.alpha_s)},
                {"alpha_c", number(p.alpha_c)}, {"beta", number(p.beta)},
                {"eta", number(p.eta)}};
}

Json to_json(const FullParams& p) {
    return Json{{"mu1", number(p.mu1)},         {"mu2", number(p.mu2)},
                {"alpha11", number(p.alpha11)}, {"alpha22", number(p.alpha22)},
                {"alpha12", number(p.alpha12)}, {"alpha21", number(p.alpha21)},
                {"beta11", number(p.beta11)},   {"beta22", number(p.beta22)},
                {"beta12", number(p.beta12)},   {"beta21", number(p.beta21)},
                {"eta", number(p.eta)}};
}

Json to_json(const FitResult<SymmetricParams>& r) {
    const auto [qs, qc] = branching_coefficients(r.params, r.mean_mark);
    return Json{{"model", "symmetric"},
                {"params", to_json(r.params)},
                {"stderr", to_json(r.std_errors)},
                {"loglik", number(r.loglik)},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"starts", r.starts},
                {"mean_mark", number(r.mean_mark)},
                {"q_s", number(qs)},
                {"q_c", number(qc)}};
}

Json to_json(const FitResult<FullParams>& r) {
    return Json{{"model", "full"},
                {"params", to_json(r.params)},
                {"stderr", to_json(r.std_errors)},
                {"loglik", number(r.loglik)},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"starts", r.starts},
                {"mean_mark", number(r.mean_mark)}};
}

Json to_json(const KStatistics& ks) {
    return Json{{"e_lambda", number(ks.e_lambda)},
                {"k1", number(ks.k1())},
                {"k2", number(ks.k2())},
                {"k_lambda_sq", number(ks.k_lambda_sq())},
                {"k_lambda_cross", number(ks.k_lambda_cross())},
                {"k_lambda_n", number(ks.k_lambda_n())},
                {"k_lambda_n_cross", number(ks.k_lambda_n_cross())}};
}

Json to_json(const VolatilityReport& r) {
    return Json{{"hawkes_full", number(r.hawkes_full)},
                {"hawkes_approx", number(r.hawkes_approx)},
                {"hawkes_iid", number(r.hawkes_iid)},
                {"tsrv", number(r.tsrv)},
                {"horizon", r.horizon},
                {"s0", r.s0},
                {"delta", r.delta},
                {"scaling", r.scaling}};
}

SymmetricParams symmetric_from_json(const Json& j, SymmetricParams base) {
    base.mu = number_or(j, "mu", base.mu);
    base.alpha_s = number_or(j, "alpha_s", base.alpha_s);
    base.alpha_c = number_or(j, "alpha_c", base.alpha_c);
    base.beta = number_or(j, "beta", base.beta);
    base.eta = number_or(j, "eta", base.eta);
    return base;
}

FullParams full_from_json(const Json& j, FullParams base) {
    base.mu1 = number_or(j, "mu1", base.mu1);
    base.mu2 = number_or(j, "mu2", base.mu2);
    base.alpha11 = number_or(j, "alpha11", base.alpha11);
    base.alpha22 = number_or(j, "alpha22", base.alpha22);
    base.alpha12 = number_or(j, "alpha12", base.alpha12);
    base.alpha21 = number_or(j, "alpha21", base.alpha21);
    base.beta11 = number_or(j, "beta11", base.beta11);
    base.beta22 = number_or(j, "beta22", base.beta22);
    base.beta12 = number_or(j, "beta12", base.beta12);
    base.beta21 = number_or(j, "beta21", base.beta21);
    base.eta = number_or(j, "eta", base.eta);
    return base;
}

} // namespace mhawkes
