#include "mhawkes/tickdata.hpp"

#include "mhawkes/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace mhawkes {

void SessionConfig::validate() const {
    if (!(open < close)) throw InvalidParameter("session open must precede close");
    if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
    if (!(tick > 0.0)) throw InvalidParameter("tick must be positive");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool to_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool on_grid(double price, double tick) {
    return std::abs(price - std::round(price / tick) * tick) <= 1e-9;
}

} // namespace

double parse_clock(const std::string& text) {
    const auto parts = split(trim(text), ':');
    if (parts.size() != 3) throw InvalidParameter("clock time must be HH:MM:SS");
    double h = 0.0, m = 0.0, s = 0.0;
    if (!to_double(parts[0], h) || !to_double(parts[1], m) || !to_double(parts[2], s))
        throw InvalidParameter("clock time must be HH:MM:SS");
    if (h < 0.0 || h > 23.0 || h != std::floor(h) || m < 0.0 || m >= 60.0 || m != std::floor(m) ||
        s < 0.0 || s >= 60.0)
        throw InvalidParameter("clock time out of range");
    return h * 3600.0 + m * 60.0 + s;
}

std::string format_clock(double seconds) {
    const auto whole = static_cast<long long>(std::floor(seconds));
    const double frac = seconds - static_cast<double>(whole);
    std::ostringstream os;
    os << std::setfill('0') << std::setw(2) << whole / 3600 << ':' << std::setw(2) << (whole / 60) % 60
       << ':' << std::setw(2) << whole % 60;
    if (frac > 0.0) {
        std::ostringstream f;
        f << std::fixed << std::setprecision(6) << frac;
        std::string digits = f.str().substr(1); // ".dddddd"
        while (digits.back() == '0') digits.pop_back();
        os << digits;
    }
    return os.str();
}

ParsedQuotes parse_quotes(std::istream& in, const SessionConfig& config) {
    config.validate();
    ParsedQuotes out;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    double last_tod = -1.0;
    long long day = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        if (!header) {
            if (body != "timestamp,bid,ask") throw ParseError("expected header timestamp,bid,ask", line_no);
            header = true;
            continue;
        }
        const auto fields = split(body, ',');
        if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
        double tod = 0.0;
        long long row_day = day;
        if (config.time_format == TimeFormat::Clock) {
            try {
                tod = parse_clock(std::string(fields[0]));
            } catch (const InvalidParameter& e) {
                throw ParseError(e.what(), line_no);
            }
            if (!out.days.empty() && tod < last_tod) row_day = day + 1;
        } else {
            double epoch = 0.0;
            if (!to_double(fields[0], epoch) || epoch < 0.0) throw ParseError("bad epoch timestamp", line_no);
            row_day = static_cast<long long>(std::floor(epoch / 86400.0));
            tod = epoch - static_cast<double>(row_day) * 86400.0;
            if (!out.days.empty() && (row_day < day || (row_day == day && tod < last_tod)))
                throw ParseError("timestamps must be nondecreasing", line_no);
        }
        double bid = 0.0, ask = 0.0;
        if (!to_double(fields[1], bid) || !to_double(fields[2], ask))
            throw ParseError("bid and ask must be numbers", line_no);
        if (!(bid > 0.0) || !(ask > 0.0)) throw ParseError("prices must be positive", line_no);
        if (!on_grid(bid, config.tick) || !on_grid(ask, config.tick))
            throw ParseError("price off the tick grid", line_no);

        if (out.days.empty() || row_day != day) {
            out.days.push_back({row_day, {}});
            day = row_day;
        }
        last_tod = tod;
        if (bid > ask) {
            ++out.crossed;
            continue;
        }
        if (tod < config.open || tod >= config.close) {
            ++out.outside_session;
            continue;
        }
        out.days.back().records.push_back({tod, bid, ask});
    }
    return out;
}

EventStream subdivide_timestamps(const EventStream& stream) {
    EventStream out = stream;
    auto& ev = out.events;
    std::size_t i = 0;
    while (i < ev.size()) {
        const double t = ev[i].time;
        std::size_t j = i + 1;
        if (t == std::floor(t)) {
            while (j < ev.size() && ev[j].time == t) ++j;
            const double m = static_cast<double>(j - i);
            for (std::size_t r = i; r < j; ++r)
                ev[r].time = t + static_cast<double>(r - i + 1) / (m + 1.0);
        }
        i = j;
    }
    return out;
}

EventStream to_mid_events(const std::vector<QuoteRecord>& quotes, const SessionConfig& config) {
    config.validate();
    EventStream stream;
    stream.horizon = config.close - config.open;
    bool first = true;
    long long prev = 0;
    for (const auto& q : quotes) {
        const double units = q.mid() / config.delta;
        const double rounded = std::round(units);
        if (std::abs(units - rounded) > 1e-6) {
            std::ostringstream os;
            os << "mid " << q.mid() << " at " << format_clock(q.timestamp)
               << " is not a multiple of delta " << config.delta;
            throw DataIntegrityError(os.str());
        }
        const auto m = static_cast<long long>(rounded);
        if (first) {
            first = false;
            prev = m;
            continue;
        }
        if (m == prev) continue;
        const long long diff = m - prev;
        prev = m;
        stream.events.push_back({q.timestamp - config.open, diff > 0 ? Side::Up : Side::Down,
                                 static_cast<int>(diff > 0 ? diff : -diff)});
    }
    if (config.subdivide) stream = subdivide_timestamps(stream);
    stream.validate();
    return stream;
}

std::vector<QuoteRecord> synthesize_quotes(const EventStream& stream, const SessionConfig& config,
                                           double opening_mid) {
    config.validate();
    if (std::abs(config.tick - 2.0 * config.delta) > 1e-12)
        throw InvalidParameter("quote synthesis needs tick = 2 delta");
    auto quote = [&](double ts, long long m) {
        // m half-ticks: odd mids sit inside a one-tick spread, even mids inside two.
        const long long bid = m % 2 != 0 ? (m - 1) / 2 : m / 2 - 1;
        const long long ask = m % 2 != 0 ? (m + 1) / 2 : m / 2 + 1;
        return QuoteRecord{ts, static_cast<double>(bid) * config.tick, static_cast<double>(ask) * config.tick};
    };
    long long m = std::llround(opening_mid / config.delta);
    std::vector<QuoteRecord> out;
    out.reserve(stream.size() + 1);
    out.push_back(quote(config.open, m));
    for (const auto& e : stream.events) {
        m += sign_of(e.side) * e.mark;
        if (m < 4) throw InvalidParameter("synthetic mid price fell below two ticks");
        out.push_back(quote(config.open + std::floor(e.time), m));
    }
    return out;
}

void write_quotes(std::ostream& out, const std::vector<QuoteRecord>& quotes, TimeFormat format) {
    out << "timestamp,bid,ask\n";
    out << std::setprecision(12);
    for (const auto& q : quotes) {
        if (format == TimeFormat::Clock)
            out << format_clock(q.timestamp);
        else
            out << std::setprecision(17) << q.timestamp << std::setprecision(12);
        out << ',' << q.bid << ',' << q.ask << '\n';
    }
}

std::map<int, double> mark_distribution(const EventStream& stream) {
    if (stream.empty()) throw DegenerateError("mark distribution of an empty stream");
    std::map<int, std::size_t> counts;
    for (const auto& e : stream.events) ++counts[e.mark];
    std::map<int, double> pct;
    const double n = static_cast<double>(stream.size());
    for (const auto& [k, c] : counts) pct[k] = 100.0 * static_cast<double>(c) / n;
    return pct;
}

ProxyTable proxy_intensity(const EventStream& stream, const ProxyOptions& options) {
    if (stream.empty()) throw DegenerateError("proxy intensity of an empty stream");
    if (!(options.tau > 0.0)) throw InvalidParameter("tau must be positive");
    const double T = stream.horizon;
    const double tau = options.tau;
    if (options.edge == EdgePolicy::Clamp && tau > T)
        throw InvalidParameter("clamped windows cannot exceed the horizon");

    std::vector<double> times;
    std::vector<std::size_t> up_before{0}; // up events among the first i
    times.reserve(stream.size());
    for (const auto& e : stream.events) {
        times.push_back(e.time);
        up_before.push_back(up_before.back() + (e.side == Side::Up ? 1 : 0));
    }
    // Events with index in [lo, hi).
    auto counts = [&](std::size_t lo, std::size_t hi) {
        const std::size_t up = up_before[hi] - up_before[lo];
        return std::pair<std::size_t, std::size_t>{up, hi - lo - up};
    };
    auto first_at_or_after = [&](double x) {
        return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), x) - times.begin());
    };
    auto first_after = [&](double x) {
        return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), x) - times.begin());
    };

    ProxyTable table;
    for (const auto& e : stream.events) {
        std::size_t lo = 0, hi = 0;
        if (options.side == WindowSide::Trailing) {
            double a = e.time - tau;
            if (a < 0.0) {
                if (options.edge == EdgePolicy::Exclude) {
                    ++table.excluded;
                    continue;
                }
                a = 0.0;
            }
            const double b = options.edge == EdgePolicy::Clamp ? std::max(a + tau, e.time) : e.time;
            lo = first_at_or_after(a);
            hi = b >= T ? times.size() : first_at_or_after(b);
        } else {
            double b = e.time + tau;
            if (b > T) {
                if (options.edge == EdgePolicy::Exclude) {
                    ++table.excluded;
                    continue;
                }
                b = T;
            }
            const double a = b - tau;
            lo = a < e.time ? first_at_or_after(a) : first_after(e.time);
            hi = first_after(b);
        }
        const auto [cu, cd] = counts(lo, hi);
        ProxyRecord r{e.time, e.side, e.mark, static_cast<double>(cu) / tau,
                      static_cast<double>(cd) / tau, 0.0};
        r.total = r.up + r.down;
        table.events.push_back(r);
    }

    std::map<int, std::vector<const ProxyRecord*>> groups;
    for (const auto& r : table.events) groups[sign_of(r.side) * r.mark].push_back(&r);
    for (const auto& [key, rows] : groups) {
        auto stats = [&rows](double ProxyRecord::*field) {
            const double n = static_cast<double>(rows.size());
            double mean = 0.0;
            for (const auto* r : rows) mean += r->*field;
            mean /= n;
            double ss = 0.0;
            for (const auto* r : rows) ss += (r->*field - mean) * (r->*field - mean);
            const double se = rows.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
            return std::pair<double, double>{mean, se};
        };
        const auto [mu, su] = stats(&ProxyRecord::up);
        const auto [md, sd] = stats(&ProxyRecord::down);
        const auto [mt, st] = stats(&ProxyRecord::total);
        table.bins.push_back({key, rows.size(), mu, su, md, sd, mt, st});
    }
    return table;
}

std::vector<MarkBin> conditional_mark_mean(const EventStream& stream, const IntensityPath& path,
                                           std::size_t min_count) {
    if (path.size() != stream.size()) throw InvalidParameter("intensity path does not match the stream");
    std::map<int, std::pair<std::size_t, double>> bins;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const double lambda = path[i].of(stream.events[i].side);
        const int n = std::max(1, static_cast<int>(std::ceil(lambda)));
        auto& [count, sum] = bins[n];
        ++count;
        sum += stream.events[i].mark;
    }
    std::vector<MarkBin> out;
    for (const auto& [n, cs] : bins)
        out.push_back({n, cs.first, cs.second / static_cast<double>(cs.first), cs.first < min_count});
    return out;
}

} // namespace mhawkes
