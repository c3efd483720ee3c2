#include "mhawkes/cli.hpp"

#include "mhawkes/ensemble.hpp"
#include "mhawkes/errors.hpp"
#include "mhawkes/estimate.hpp"
#include "mhawkes/io.hpp"
#include "mhawkes/simulate.hpp"
#include "mhawkes/tickdata.hpp"
#include "mhawkes/volatility.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace mhawkes::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::uint64_t seed{1};
    int paths{1};
    std::string model{"symmetric"};
    std::string variant{"approx"};
    double small_scale{1.0};
    double large_scale{300.0};
    double window{0.0};
    std::string window_mode{"reuse"};
    double s0{100.0};
    double delta{0.005};
    double annualize{1.0};
    std::string out{"out"};
    std::vector<std::string> inputs;
    std::vector<std::string> positional;

    double horizon{19800.0};
    double burn_in{0.0};
    double blowup_guard{1e6};
    std::string params_file;
    double mu{0.15}, alpha_s{0.62}, alpha_c{0.50}, beta{1.90}, eta{0.22};
    std::string full_params;
    std::string sampler{"geometric:0.18,1.0,2.2"};
    std::vector<std::string> segments;
    int starts{3};
    bool fixed{false};
    bool tsrv_only{false};

    std::string open{"10:00:00"};
    std::string close{"15:30:00"};
    double tick{0.01};
    std::string time_format{"clock"};
    bool no_subdivide{false};
    bool diagnostics{false};
    double tau{10.0};
    std::string proxy_window{"trailing"};
    std::string proxy_edge{"exclude"};
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

double number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidParameter("bad number for " + what + ": '" + text + "'");
    }
}

MarkSampler parse_sampler(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos)
        for (const auto& a : split(spec.substr(colon + 1), ',')) args.push_back(number(a, "sampler"));
    MarkSampler s;
    if (kind == "unit" && args.empty()) {
        s = ConstantOneMarks{};
    } else if (kind == "geometric" && args.size() == 3) {
        s = ConditionalGeometricMarks{args[0], args[1], args[2]};
    } else if (kind == "pmf" && !args.empty()) {
        // Percentages or probabilities, normalized here.
        double total = 0.0;
        for (double a : args) total += a;
        if (!(total > 0.0)) throw InvalidParameter("pmf needs positive mass");
        for (double& a : args) a /= total;
        s = EmpiricalMarks{args};
    } else {
        throw InvalidParameter("sampler must be unit, geometric:c,d,U or pmf:p1,p2,...");
    }
    validate(s);
    return s;
}

void set_symmetric(SymmetricParams& p, MarkSampler& sampler, const std::string& key, double v) {
    if (key == "mu") p.mu = v;
    else if (key == "alpha_s") p.alpha_s = v;
    else if (key == "alpha_c") p.alpha_c = v;
    else if (key == "beta") p.beta = v;
    else if (key == "eta") p.eta = v;
    else if (key == "c" || key == "d" || key == "U") {
        auto* g = std::get_if<ConditionalGeometricMarks>(&sampler);
        if (!g) throw InvalidParameter("segment key " + key + " needs a geometric sampler");
        (key == "c" ? g->c : key == "d" ? g->d : g->U) = v;
    } else {
        throw InvalidParameter("unknown segment key '" + key + "'");
    }
}

/// "duration:key=val,key=val" relative to the base parameters and sampler.
Segment parse_segment(const std::string& spec, const SymmetricParams& base, const MarkSampler& sampler) {
    const auto colon = spec.find(':');
    Segment seg{number(spec.substr(0, colon), "segment duration"), base, sampler};
    if (colon != std::string::npos)
        for (const auto& kv : split(spec.substr(colon + 1), ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InvalidParameter("segment entries must be key=value");
            set_symmetric(seg.params, seg.sampler, kv.substr(0, eq), number(kv.substr(eq + 1), kv));
        }
    validate(seg.sampler);
    return seg;
}

struct Model {
    SymmetricParams symmetric;
    FullParams full;
    MarkSampler sampler;
    Scenario scenario;
    double horizon{0.0};
};

Model resolve_model(const Options& o, const CLI::App& app) {
    Model m;
    SymmetricParams p{o.mu, o.alpha_s, o.alpha_c, o.beta, o.eta};
    Json file;
    if (!o.params_file.empty()) {
        std::ifstream in(o.params_file);
        if (!in) throw InvalidParameter("cannot open " + o.params_file);
        try {
            file = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidParameter(o.params_file + ": " + e.what());
        }
        if (file.contains("params")) file = file["params"];
        p = symmetric_from_json(file, p);
        // Explicit flags win over the file.
        if (app.count("--mu")) p.mu = o.mu;
        if (app.count("--alpha-s")) p.alpha_s = o.alpha_s;
        if (app.count("--alpha-c")) p.alpha_c = o.alpha_c;
        if (app.count("--beta")) p.beta = o.beta;
        if (app.count("--eta")) p.eta = o.eta;
    }
    p.validate();
    m.symmetric = p;
    m.full = full_from_json(file, FullParams::from_symmetric(p));
    if (!o.full_params.empty()) {
        Json kv = Json::object();
        for (const auto& item : split(o.full_params, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw InvalidParameter("full params must be key=value pairs");
            kv[item.substr(0, eq)] = number(item.substr(eq + 1), item);
        }
        m.full = full_from_json(kv, m.full);
    }
    m.full.validate();
    m.sampler = parse_sampler(o.sampler);
    if (o.segments.empty()) {
        m.horizon = o.horizon;
        m.scenario = Scenario::constant(p, m.sampler, o.horizon);
    } else {
        for (const auto& s : o.segments) m.scenario.segments.push_back(parse_segment(s, p, m.sampler));
        m.horizon = m.scenario.total_duration();
        if (app.count("--horizon") && std::abs(m.horizon - o.horizon) > 1e-9 * m.horizon)
            throw InvalidParameter("segment durations do not add up to --horizon");
    }
    if (!(m.horizon > 0.0)) throw InvalidParameter("horizon must be positive");
    return m;
}

Json sampler_json(const MarkSampler& s) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantOneMarks>) return Json{{"kind", "unit"}};
            else if constexpr (std::is_same_v<T, EmpiricalMarks>) return Json{{"kind", "pmf"}, {"pmf", v.pmf}};
            else return Json{{"kind", "geometric"}, {"c", v.c}, {"d", v.d}, {"U", v.U}};
        },
        s);
}

Json model_json(const Model& m, const Options& o) {
    Json j;
    j["model"] = o.model;
    if (o.model == "full") j["params"] = to_json(m.full);
    else j["params"] = to_json(m.symmetric);
    j["sampler"] = sampler_json(m.sampler);
    j["horizon"] = m.horizon;
    Json segs = Json::array();
    for (const auto& s : m.scenario.segments)
        segs.push_back(Json{{"duration", s.duration}, {"params", to_json(s.params)}, {"sampler", sampler_json(s.sampler)}});
    j["segments"] = segs;
    return j;
}

/// Resolved `key=value` lines of every option, leaving out unset strings and lists.
std::vector<std::string> resolved_lines(const CLI::App& app) {
    std::vector<std::string> lines;
    std::istringstream in(app.config_to_str(true, false));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || line[0] == '[' || line[0] == '#') continue;
        const std::string value = line.substr(eq + 1);
        if (value == "\"\"" || value == "[]") continue;
        lines.push_back(line);
    }
    return lines;
}

Json resolved_config(const CLI::App& app) {
    Json cfg = Json::object();
    for (const auto& line : resolved_lines(app)) {
        const auto eq = line.find('=');
        std::string value = line.substr(eq + 1);
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        cfg[line.substr(0, eq)] = value;
    }
    return cfg;
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidParameter("cannot write " + path.string());
    out << std::setw(2) << j << '\n';
}

/// manifest.json plus resolved.ini, which reruns the command via --config.
void write_manifest(const fs::path& dir, Json manifest, const CLI::App& app) {
    manifest["config"] = resolved_config(app);
    write_json(dir / "manifest.json", manifest);
    std::ofstream ini(dir / "resolved.ini");
    for (const auto& line : resolved_lines(app)) ini << line << '\n';
}

fs::path prepare_out(const Options& o) {
    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidParameter("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::string path_name(const std::string& prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04zu", prefix.c_str(), i);
    return buf;
}

VarianceVariant parse_variant(const std::string& v) {
    if (v == "full") return VarianceVariant::Full;
    if (v == "iid") return VarianceVariant::Iid;
    return VarianceVariant::Approx;
}

ReportOptions report_options(const Options& o) {
    return {o.s0, o.delta, o.annualize, o.small_scale, o.large_scale};
}

FitOptions fit_options(const Options& o) {
    FitOptions f;
    f.starts = o.starts;
    return f;
}

std::vector<std::string> all_inputs(const Options& o) {
    std::vector<std::string> in = o.inputs;
    in.insert(in.end(), o.positional.begin(), o.positional.end());
    return in;
}

std::vector<std::pair<std::string, EventStream>> load_inputs(const Options& o) {
    const auto files = all_inputs(o);
    if (files.empty()) throw InvalidParameter("no input files given");
    std::vector<std::pair<std::string, EventStream>> out;
    for (const auto& f : files) {
        if (!fs::exists(f)) throw InvalidParameter("input not found: " + f);
        out.emplace_back(f, load_stream(f));
    }
    return out;
}

SimulationResult simulate_one(const Model& m, const Options& o, std::uint64_t seed) {
    SimulationOptions so;
    so.burn_in = o.burn_in;
    so.blowup_guard = o.blowup_guard;
    if (o.model == "full") return simulate_full(m.full, m.sampler, m.horizon, seed, so);
    return simulate_path(m.scenario, m.horizon, seed, so);
}

bool is_numerical(const std::exception& e) {
    return dynamic_cast<const DegenerateError*>(&e) || dynamic_cast<const InvalidLikelihood*>(&e) ||
           dynamic_cast<const NonstationaryError*>(&e) || dynamic_cast<const ExplosionError*>(&e) ||
           dynamic_cast<const InsufficientData*>(&e);
}

// ---- commands ------------------------------------------------------------

int cmd_simulate(const Options& o, const CLI::App& app, std::ostream& out) {
    const Model m = resolve_model(o, app);
    if (o.paths < 1) throw InvalidParameter("--paths must be at least 1");
    const fs::path dir = prepare_out(o);
    Json manifest{{"command", "simulate"}, {"seed", o.seed}};
    manifest["scenario"] = model_json(m, o);
    Json paths = Json::array();
    const std::vector<std::string> warnings = o.model == "full" ? stationarity_warnings(m.full, m.sampler)
                                                                  : stationarity_warnings(m.scenario);
    int explosions = 0;
    for (int i = 0; i < o.paths; ++i) {
        const std::uint64_t seed = path_seed(o.seed, static_cast<std::uint64_t>(i));
        const std::string file = path_name("path", static_cast<std::size_t>(i)) + ".csv";
        Json entry{{"index", i}, {"seed", seed}};
        try {
            const auto r = simulate_one(m, o, seed);
            save_stream(dir / file, r.stream);
            entry["file"] = file;
            entry["events"] = r.stream.size();
            entry["status"] = "ok";
        } catch (const ExplosionError& e) {
            ++explosions;
            entry["status"] = "explosion";
            entry["time_reached"] = e.time_reached();
            entry["message"] = e.what();
        }
        paths.push_back(entry);
    }
    manifest["paths"] = paths;
    manifest["explosions"] = explosions;
    manifest["warnings"] = warnings;
    write_manifest(dir, manifest, app);
    out << "simulated " << o.paths << " path(s), " << explosions << " explosion(s) -> " << dir.string() << '\n';
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    return explosions == o.paths ? NumericalFailure : Success;
}

SessionConfig session_config(const Options& o) {
    SessionConfig c;
    try {
        c.open = parse_clock(o.open);
        c.close = parse_clock(o.close);
    } catch (const InvalidParameter& e) {
        throw InvalidParameter(std::string("session times: ") + e.what());
    }
    c.delta = o.delta;
    c.tick = o.tick;
    c.subdivide = !o.no_subdivide;
    c.time_format = o.time_format == "epoch" ? TimeFormat::Epoch : TimeFormat::Clock;
    c.validate();
    return c;
}

void write_diagnostics(const fs::path& dir, const std::string& stem, const EventStream& s, const Options& o) {
    if (s.empty()) return;
    std::ofstream marks(dir / (stem + "_marks.csv"));
    marks << "mark,percent\n" << std::setprecision(12);
    for (const auto& [k, pct] : mark_distribution(s)) marks << k << ',' << pct << '\n';

    ProxyOptions po;
    po.tau = o.tau;
    po.side = o.proxy_window == "leading" ? WindowSide::Leading : WindowSide::Trailing;
    po.edge = o.proxy_edge == "clamp" ? EdgePolicy::Clamp : EdgePolicy::Exclude;
    const auto table = proxy_intensity(s, po);
    std::ofstream proxy(dir / (stem + "_proxy.csv"));
    proxy << "signed_mark,count,mean_up,se_up,mean_down,se_down,mean_total,se_total\n" << std::setprecision(12);
    for (const auto& b : table.bins)
        proxy << b.signed_mark << ',' << b.count << ',' << b.mean_up << ',' << b.se_up << ',' << b.mean_down << ','
              << b.se_down << ',' << b.mean_total << ',' << b.se_total << '\n';
}

int cmd_ingest(const Options& o, const CLI::App& app, std::ostream& out) {
    const SessionConfig cfg = session_config(o);
    const auto files = all_inputs(o);
    if (files.empty()) throw InvalidParameter("no input files given");
    const fs::path dir = prepare_out(o);
    Json manifest{{"command", "ingest"}};
    Json items = Json::array();
    std::size_t days = 0;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw InvalidParameter("cannot open " + f);
        ParsedQuotes parsed;
        try {
            parsed = parse_quotes(in, cfg);
        } catch (const ParseError& e) {
            throw ParseError(f + ": " + e.what(), e.line());
        }
        Json item{{"input", f}, {"crossed", parsed.crossed}, {"outside_session", parsed.outside_session}};
        Json outputs = Json::array();
        const std::string stem = fs::path(f).stem().string();
        for (std::size_t d = 0; d < parsed.days.size(); ++d) {
            const auto stream = to_mid_events(parsed.days[d].records, cfg);
            const std::string name = path_name(stem + "_day", d);
            save_stream(dir / (name + ".csv"), stream);
            if (o.diagnostics) write_diagnostics(dir, name, stream, o);
            outputs.push_back(Json{{"file", name + ".csv"}, {"day", parsed.days[d].day},
                                   {"quotes", parsed.days[d].records.size()}, {"events", stream.size()}});
            ++days;
        }
        item["days"] = outputs;
        items.push_back(item);
        if (parsed.crossed) out << "warning: " << f << ": dropped " << parsed.crossed << " crossed quote(s)\n";
    }
    manifest["inputs"] = items;
    write_manifest(dir, manifest, app);
    out << "ingested " << days << " day(s) -> " << dir.string() << '\n';
    return Success;
}

int cmd_fit(const Options& o, const CLI::App& app, std::ostream& out) {
    const auto inputs = load_inputs(o);
    const fs::path dir = prepare_out(o);
    Json results = Json::array();
    std::ofstream csv(dir / "fits.csv");
    csv << std::setprecision(10);
    if (o.model == "full")
        csv << "input,loglik,converged,mu1,mu2,alpha11,alpha22,alpha12,alpha21,beta11,beta22,beta12,beta21,eta,"
               "se_mu1,se_mu2,se_alpha11,se_alpha22,se_alpha12,se_alpha21,se_beta11,se_beta22,se_beta12,se_beta21,se_eta\n";
    else
        csv << "input,loglik,converged,mu,alpha_s,alpha_c,beta,eta,se_mu,se_alpha_s,se_alpha_c,se_beta,se_eta,q_s,q_c\n";
    int failures = 0;
    for (const auto& [name, stream] : inputs) {
        try {
            if (o.model == "full") {
                const auto r = fit_full(stream, initial_guess_full(stream), {}, fit_options(o));
                Json j = to_json(r);
                j["input"] = name;
                results.push_back(j);
                csv << name << ',' << r.loglik << ',' << r.converged;
                for (const auto* p : {&r.params, &r.std_errors}) {
                    const auto v = to_vector(*p);
                    for (int i = 0; i < v.size(); ++i) csv << ',' << v(i);
                }
                csv << '\n';
            } else {
                const auto r = fit_symmetric(stream, initial_guess(stream), {}, fit_options(o));
                Json j = to_json(r);
                j["input"] = name;
                results.push_back(j);
                csv << name << ',' << r.loglik << ',' << r.converged;
                for (const auto* p : {&r.params, &r.std_errors}) {
                    const auto v = to_vector(*p);
                    for (int i = 0; i < v.size(); ++i) csv << ',' << v(i);
                }
                const auto [qs, qc] = branching_coefficients(r.params, r.mean_mark);
                csv << ',' << qs << ',' << qc << '\n';
            }
        } catch (const Error& e) {
            if (!is_numerical(e)) throw;
            ++failures;
            results.push_back(Json{{"input", name}, {"error", e.what()}});
            out << "error: " << name << ": " << e.what() << '\n';
        }
    }
    write_json(dir / "fits.json", results);
    write_manifest(dir, Json{{"command", "fit"},
                                           {"inputs", all_inputs(o)}, {"failures", failures}}, app);
    out << "fitted " << inputs.size() - static_cast<std::size_t>(failures) << '/' << inputs.size()
        << " stream(s) -> " << dir.string() << '\n';
    return failures ? NumericalFailure : Success;
}

int cmd_vol(const Options& o, const CLI::App& app, std::ostream& out) {
    const auto inputs = load_inputs(o);
    const fs::path dir = prepare_out(o);
    const ReportOptions ro = report_options(o);
    const Model m = o.fixed ? resolve_model(o, app) : Model{};
    Json results = Json::array();
    std::ofstream csv(dir / "vol.csv");
    csv << "input,horizon,hawkes_full,hawkes_approx,hawkes_iid,tsrv\n" << std::setprecision(10);
    int failures = 0;
    for (const auto& [name, stream] : inputs) {
        Json j{{"input", name}};
        VolatilityReport rep;
        rep.horizon = stream.horizon;
        rep.s0 = ro.s0;
        rep.delta = ro.delta;
        rep.scaling = ro.scaling;
        rep.hawkes_full = rep.hawkes_approx = rep.hawkes_iid = std::numeric_limits<double>::quiet_NaN();
        try {
            rep.tsrv = tsrv(price_path(stream, ro.s0, ro.delta), ro.small_scale, ro.large_scale) / ro.s0 * ro.scaling;
            if (!o.tsrv_only) {
                SymmetricParams p = m.symmetric;
                if (!o.fixed) {
                    const auto fit = fit_symmetric(stream, initial_guess(stream), {}, fit_options(o));
                    p = fit.params;
                    j["fit"] = to_json(fit);
                }
                const auto ks = estimate_k_statistics(stream, infer_intensity(stream, p), stream.horizon);
                const double tsrv_value = rep.tsrv;
                rep = volatility_report(stream, p, ks, ro);
                rep.tsrv = tsrv_value;
                j["k_statistics"] = to_json(ks);
                j["selected"] = hawkes_volatility(p, ks, ro.s0, ro.delta, stream.horizon, ro.scaling,
                                                  parse_variant(o.variant));
                if (o.window > 0.0) {
                    IntradayOptions io;
                    io.window = o.window;
                    io.s0 = ro.s0;
                    io.delta = ro.delta;
                    io.mode = o.window_mode == "refit" ? WindowMode::Refit : WindowMode::Reuse;
                    const auto series = intraday_cumulative(stream, p, io);
                    const std::string file = fs::path(name).stem().string() + "_intraday.csv";
                    std::ofstream s(dir / file);
                    s << "time,variance,cumulative\n" << std::setprecision(12);
                    for (const auto& pt : series)
                        s << pt.time << ',' << pt.variance * ro.scaling * ro.scaling << ','
                          << pt.cumulative * ro.scaling << '\n';
                    j["intraday"] = file;
                }
            }
        } catch (const Error& e) {
            if (!is_numerical(e)) throw;
            ++failures;
            j["error"] = e.what();
            out << "error: " << name << ": " << e.what() << '\n';
        }
        j["report"] = to_json(rep);
        results.push_back(j);
        auto cell = [](double v) {
            std::ostringstream c;
            if (std::isfinite(v)) c << std::setprecision(10) << v;
            return c.str();
        };
        csv << name << ',' << stream.horizon << ',' << cell(rep.hawkes_full) << ',' << cell(rep.hawkes_approx) << ','
            << cell(rep.hawkes_iid) << ',' << cell(rep.tsrv) << '\n';
    }
    write_json(dir / "vol.json", results);
    write_manifest(dir, Json{{"command", "vol"},
                                           {"inputs", all_inputs(o)}, {"failures", failures}}, app);
    out << "volatility for " << inputs.size() << " stream(s) -> " << dir.string() << '\n';
    return failures ? NumericalFailure : Success;
}

int cmd_report(const Options& o, const CLI::App& app, std::ostream& out) {
    const fs::path dir = prepare_out(o);
    const ReportOptions ro = report_options(o);
    const VarianceVariant variant = parse_variant(o.variant);
    std::vector<PathAnalysis> analyses;
    Json manifest{{"command", "report"}, {"seed", o.seed}};
    Json skipped = Json::array();
    std::optional<Model> model;

    auto analyze = [&](const std::string& label, const EventStream& s) {
        try {
            analyses.push_back(analyze_path(s, initial_guess(s), ro, variant, fit_options(o)));
        } catch (const Error& e) {
            if (!is_numerical(e)) throw;
            skipped.push_back(Json{{"path", label}, {"error", e.what()}});
        }
    };
    if (!all_inputs(o).empty()) {
        for (const auto& [name, stream] : load_inputs(o)) analyze(name, stream);
        manifest["inputs"] = all_inputs(o);
    } else {
        model = resolve_model(o, app);
        manifest["scenario"] = model_json(*model, o);
        for (int i = 0; i < o.paths; ++i) {
            const std::uint64_t seed = path_seed(o.seed, static_cast<std::uint64_t>(i));
            try {
                analyze(std::to_string(i), simulate_one(*model, o, seed).stream);
            } catch (const ExplosionError& e) {
                skipped.push_back(Json{{"path", i}, {"seed", seed}, {"error", e.what()}});
            }
        }
    }
    manifest["skipped"] = skipped;
    write_manifest(dir, manifest, app);
    const EnsembleSummary sum = summarize(analyses);

    std::ofstream csv(dir / "report.csv");
    csv << "quantity,true,mean,std\n" << std::setprecision(10);
    const char* names[5] = {"mu", "alpha_s", "alpha_c", "beta", "eta"};
    std::optional<SymmetricVector> truth;
    if (model && o.model != "full" && model->scenario.segments.size() == 1) truth = to_vector(model->symmetric);
    for (int i = 0; i < 5; ++i) {
        csv << names[i] << ',';
        if (truth) csv << (*truth)(i);
        csv << ',' << sum.params[static_cast<std::size_t>(i)].mean << ',' << sum.params[static_cast<std::size_t>(i)].std << '\n';
    }
    const double svol = sum.sample_vol * ro.scaling;
    csv << "S.Vol,," << svol << ",\n";
    csv << "TSRV,," << sum.tsrv.mean << ',' << sum.tsrv.std << '\n';
    csv << "H.Vol,," << sum.hawkes.mean << ',' << sum.hawkes.std << '\n';
    csv << "paths,," << sum.paths << ",\n";
    csv << "converged,," << sum.converged << ",\n";
    const bool ordering = sum.tsrv.mean < sum.hawkes.mean && sum.hawkes.mean < svol;
    csv << "ordering_tsrv_hvol_svol,," << (ordering ? 1 : 0) << ",\n";

    std::ofstream per(dir / "paths.csv");
    per << "path,mu,alpha_s,alpha_c,beta,eta,loglik,converged,hawkes_vol,tsrv_vol,terminal_return\n"
        << std::setprecision(10);
    for (std::size_t i = 0; i < analyses.size(); ++i) {
        const auto& a = analyses[i];
        const auto& p = a.fit.params;
        per << i << ',' << p.mu << ',' << p.alpha_s << ',' << p.alpha_c << ',' << p.beta << ',' << p.eta << ','
            << a.fit.loglik << ',' << a.fit.converged << ',' << a.hawkes_vol << ',' << a.tsrv_vol << ','
            << a.terminal_return << '\n';
    }
    out << "report over " << sum.paths << " path(s): S.Vol " << svol << ", TSRV " << sum.tsrv.mean << ", H.Vol "
        << sum.hawkes.mean << (ordering ? " (TSRV < H.Vol < S.Vol)" : "") << " -> " << dir.string() << '\n';
    return Success;
}

void add_options(CLI::App& app, Options& o) {
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
    app.add_option("--seed", o.seed, "Master seed; path i uses a seed derived from it")->capture_default_str();
    app.add_option("--paths", o.paths, "Number of simulated paths")->capture_default_str();
    app.add_option("--model", o.model, "symmetric or full")
        ->check(CLI::IsMember({"symmetric", "full"}))->capture_default_str();
    app.add_option("--variant", o.variant, "Hawkes volatility variant")
        ->check(CLI::IsMember({"full", "approx", "iid"}))->capture_default_str();
    app.add_option("--small-scale", o.small_scale, "TSRV small scale, seconds")->capture_default_str();
    app.add_option("--large-scale", o.large_scale, "TSRV large scale, seconds")->capture_default_str();
    app.add_option("--window", o.window, "Intraday window in seconds (0 disables)")->capture_default_str();
    app.add_option("--window-mode", o.window_mode, "reuse or refit")
        ->check(CLI::IsMember({"reuse", "refit"}))->capture_default_str();
    app.add_option("--s0", o.s0, "Initial price")->capture_default_str();
    app.add_option("--delta", o.delta, "Minimum mid-price move")->capture_default_str();
    app.add_option("--annualize", o.annualize, "Factor applied to volatilities")->capture_default_str();
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--input", o.inputs, "Input file (repeatable)");

    app.add_option("--horizon", o.horizon, "Simulation horizon, seconds")->capture_default_str();
    app.add_option("--burn-in", o.burn_in, "Seconds simulated before time zero")->capture_default_str();
    app.add_option("--blowup-guard", o.blowup_guard, "Intensity that aborts a path")->capture_default_str();
    app.add_option("--params", o.params_file, "JSON parameter file");
    app.add_option("--mu", o.mu)->capture_default_str();
    app.add_option("--alpha-s", o.alpha_s)->capture_default_str();
    app.add_option("--alpha-c", o.alpha_c)->capture_default_str();
    app.add_option("--beta", o.beta)->capture_default_str();
    app.add_option("--eta", o.eta)->capture_default_str();
    app.add_option("--full-params", o.full_params, "Full-model overrides, e.g. mu1=0.14,beta12=2.1");
    app.add_option("--sampler", o.sampler, "unit | geometric:c,d,U | pmf:p1,p2,...")->capture_default_str();
    app.add_option("--segment", o.segments, "duration:key=val,... (repeatable, in order)");
    app.add_option("--starts", o.starts, "Optimizer starts")->capture_default_str();
    app.add_flag("--fixed", o.fixed, "vol: use the given parameters instead of fitting");
    app.add_flag("--tsrv-only", o.tsrv_only, "vol: skip the Hawkes fit");

    app.add_option("--open", o.open, "Session open")->capture_default_str();
    app.add_option("--close", o.close, "Session close")->capture_default_str();
    app.add_option("--tick", o.tick, "Quote price grid")->capture_default_str();
    app.add_option("--time-format", o.time_format, "clock or epoch")
        ->check(CLI::IsMember({"clock", "epoch"}))->capture_default_str();
    app.add_flag("--no-subdivide", o.no_subdivide, "Keep raw one-second timestamps");
    app.add_flag("--diagnostics", o.diagnostics, "ingest: write mark and proxy tables");
    app.add_option("--tau", o.tau, "Proxy window, seconds")->capture_default_str();
    app.add_option("--proxy-window", o.proxy_window, "trailing or leading")
        ->check(CLI::IsMember({"trailing", "leading"}))->capture_default_str();
    app.add_option("--proxy-edge", o.proxy_edge, "exclude or clamp")
        ->check(CLI::IsMember({"exclude", "clamp"}))->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Marked Hawkes price model: simulation, estimation and volatility"};
    app.name("mhawkes");
    app.fallthrough();
    app.require_subcommand(1);
    add_options(app, o);
    auto* simulate = app.add_subcommand("simulate", "Simulate event streams");
    auto* ingest = app.add_subcommand("ingest", "Turn bid/ask quote CSV files into per-day event streams");
    auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit of event streams");
    auto* vol = app.add_subcommand("vol", "Hawkes volatility and TSRV of event streams");
    auto* report = app.add_subcommand("report", "Ensemble table over simulated paths or input streams");
    for (auto* sub : {ingest, fit, vol, report}) sub->add_option("inputs", o.positional, "Input files");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return UsageError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o, app, out);
        if (ingest->parsed()) return cmd_ingest(o, app, out);
        if (fit->parsed()) return cmd_fit(o, app, out);
        if (vol->parsed()) return cmd_vol(o, app, out);
        if (report->parsed()) return cmd_report(o, app, out);
    } catch (const ParseError& e) {
        err << "error: line " << e.line() << ": " << e.what() << '\n';
        return UsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_numerical(e) ? NumericalFailure : UsageError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return UsageError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return UsageError;
    }
    return UsageError;
}

} // namespace mhawkes::cli
