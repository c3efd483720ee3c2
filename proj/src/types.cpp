#include "mhawkes/types.hpp"

#include "mhawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mhawkes {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw InvalidParameter(what);
}

} // namespace

void SymmetricParams::validate() const {
    require(std::isfinite(mu) && mu > 0.0, "mu must be positive");
    require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
    require(std::isfinite(alpha_s) && alpha_s >= 0.0, "alpha_s must be nonnegative");
    require(std::isfinite(alpha_c) && alpha_c >= 0.0, "alpha_c must be nonnegative");
    require(std::isfinite(eta), "eta must be finite");
}

void FullParams::validate() const {
    require(mu1 > 0.0 && mu2 > 0.0, "mu1, mu2 must be positive");
    require(beta11 > 0.0 && beta22 > 0.0 && beta12 > 0.0 && beta21 > 0.0,
            "all decay rates must be positive");
    require(alpha11 >= 0.0 && alpha22 >= 0.0 && alpha12 >= 0.0 && alpha21 >= 0.0,
            "excitation scales must be nonnegative");
    require(std::isfinite(eta), "eta must be finite");
}

FullParams FullParams::from_symmetric(const SymmetricParams& p) {
    return FullParams{p.mu,     p.mu,     p.alpha_s, p.alpha_s, p.alpha_c, p.alpha_c,
                      p.beta,   p.beta,   p.beta,    p.beta,    p.eta};
}

void EventStream::validate() const {
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw DataIntegrityError("horizon must be finite and nonnegative");
    double prev = -1.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.mark < 1)
            throw DataIntegrityError("event " + std::to_string(i) + " has mark below one");
        if (e.time < 0.0 || e.time > horizon)
            throw DataIntegrityError("event " + std::to_string(i) + " lies outside [0, horizon]");
        if (i > 0 && !(e.time > prev))
            throw DataIntegrityError("event times must be strictly increasing (event " +
                                     std::to_string(i) + ")");
        prev = e.time;
    }
}

std::size_t EventStream::count(Side s) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [s](const MarkedEvent& e) { return e.side == s; }));
}

int EventStream::max_mark() const noexcept {
    int m = 1;
    for (const auto& e : events) m = std::max(m, e.mark);
    return m;
}

double EventStream::mean_mark() const noexcept {
    if (events.empty()) return 1.0;
    double s = 0.0;
    for (const auto& e : events) s += e.mark;
    return s / static_cast<double>(events.size());
}

EventStream EventStream::slice(double from, double to) const {
    EventStream out;
    out.horizon = to - from;
    for (const auto& e : events) {
        if (e.time >= from && e.time < to) out.events.push_back({e.time - from, e.side, e.mark});
    }
    return out;
}

} // namespace mhawkes
