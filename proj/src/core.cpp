#include "mhawkes/core.hpp"

#include "mhawkes/errors.hpp"

#include <cmath>
#include <string>

namespace mhawkes {

double impact(int k, double eta, double mean_mark) {
    if (mean_mark < 1.0) throw InvalidParameter("mean mark must be at least one");
    const double num = 1.0 + (k - 1) * eta;
    const double den = 1.0 + (mean_mark - 1.0) * eta;
    if (!(num > 0.0) || !(den > 0.0))
        throw InvalidParameter("impact function is nonpositive for mark " + std::to_string(k));
    return num / den;
}

double excitation_jump(double alpha, int k, double eta) {
    const double w = 1.0 + (k - 1) * eta;
    if (!(w > 0.0))
        throw InvalidParameter("1 + (k-1) eta must be positive (k = " + std::to_string(k) + ")");
    return alpha * w;
}

IntensityState initial_state(const EventStream& stream, const SymmetricParams& p) {
    return stream.initial_intensity.value_or(IntensityState{p.mu, p.mu});
}

namespace {

void check_time(const EventStream& stream, double t) {
    if (!(t >= 0.0 && t <= stream.horizon))
        throw RangeError("time " + std::to_string(t) + " outside [0, " +
                         std::to_string(stream.horizon) + "]");
}

bool included(const MarkedEvent& e, double t, Limit convention) {
    return convention == Limit::Left ? e.time < t : e.time <= t;
}

} // namespace

IntensityState intensity_at(const EventStream& stream, const SymmetricParams& p, double t,
                            Limit convention) {
    check_time(stream, t);
    const IntensityState init = initial_state(stream, p);
    double s1 = 0.0;
    double s2 = 0.0;
    double last = 0.0;
    for (const auto& e : stream.events) {
        if (!included(e, t, convention)) break;
        const double decay = std::exp(-p.beta * (e.time - last));
        s1 *= decay;
        s2 *= decay;
        last = e.time;
        const double self = excitation_jump(p.alpha_s, e.mark, p.eta);
        const double cross = excitation_jump(p.alpha_c, e.mark, p.eta);
        if (e.side == Side::Up) {
            s1 += self;
            s2 += cross;
        } else {
            s1 += cross;
            s2 += self;
        }
    }
    const double decay = std::exp(-p.beta * (t - last));
    const double base = std::exp(-p.beta * t);
    return {p.mu + (init.up - p.mu) * base + s1 * decay,
            p.mu + (init.down - p.mu) * base + s2 * decay};
}

namespace {

// Per-channel excitation states of the fully characterized model.
struct FullState {
    double s11{0.0}, s12{0.0}, s21{0.0}, s22{0.0};

    void decay(const FullParams& p, double dt) {
        s11 *= std::exp(-p.beta11 * dt);
        s12 *= std::exp(-p.beta12 * dt);
        s21 *= std::exp(-p.beta21 * dt);
        s22 *= std::exp(-p.beta22 * dt);
    }

    void add(const FullParams& p, const MarkedEvent& e) {
        const double w = excitation_jump(1.0, e.mark, p.eta);
        if (e.side == Side::Up) {
            s11 += p.alpha11 * w;
            s21 += p.alpha21 * w;
        } else {
            s12 += p.alpha12 * w;
            s22 += p.alpha22 * w;
        }
    }
};

IntensityState full_initial(const EventStream& stream, const FullParams& p) {
    return stream.initial_intensity.value_or(IntensityState{p.mu1, p.mu2});
}

} // namespace

IntensityState intensity_at(const EventStream& stream, const FullParams& p, double t,
                            Limit convention) {
    check_time(stream, t);
    const IntensityState init = full_initial(stream, p);
    FullState st;
    double last = 0.0;
    for (const auto& e : stream.events) {
        if (!included(e, t, convention)) break;
        st.decay(p, e.time - last);
        last = e.time;
        st.add(p, e);
    }
    st.decay(p, t - last);
    return {p.mu1 + (init.up - p.mu1) * std::exp(-p.beta11 * t) + st.s11 + st.s12,
            p.mu2 + (init.down - p.mu2) * std::exp(-p.beta22 * t) + st.s21 + st.s22};
}

IntensityPath infer_intensity(const EventStream& stream, const SymmetricParams& p) {
    const IntensityState init = initial_state(stream, p);
    std::vector<IntensityState> out;
    out.reserve(stream.size());
    double s1 = 0.0;
    double s2 = 0.0;
    double last = 0.0;
    for (const auto& e : stream.events) {
        const double decay = std::exp(-p.beta * (e.time - last));
        s1 *= decay;
        s2 *= decay;
        last = e.time;
        const double base = std::exp(-p.beta * e.time);
        out.push_back({p.mu + (init.up - p.mu) * base + s1, p.mu + (init.down - p.mu) * base + s2});
        const double w = excitation_jump(1.0, e.mark, p.eta);
        if (e.side == Side::Up) {
            s1 += p.alpha_s * w;
            s2 += p.alpha_c * w;
        } else {
            s1 += p.alpha_c * w;
            s2 += p.alpha_s * w;
        }
    }
    return IntensityPath(std::move(out));
}

IntensityPath infer_intensity(const EventStream& stream, const FullParams& p) {
    const IntensityState init = full_initial(stream, p);
    std::vector<IntensityState> out;
    out.reserve(stream.size());
    FullState st;
    double last = 0.0;
    for (const auto& e : stream.events) {
        st.decay(p, e.time - last);
        last = e.time;
        out.push_back({p.mu1 + (init.up - p.mu1) * std::exp(-p.beta11 * e.time) + st.s11 + st.s12,
                       p.mu2 + (init.down - p.mu2) * std::exp(-p.beta22 * e.time) + st.s21 + st.s22});
        st.add(p, e);
    }
    return IntensityPath(std::move(out));
}

std::vector<GridPoint> intensity_on_grid(const EventStream& stream, const SymmetricParams& p,
                                         double step) {
    if (!(step > 0.0)) throw InvalidParameter("grid step must be positive");
    const IntensityState init = initial_state(stream, p);
    std::vector<GridPoint> out;
    double s1 = 0.0;
    double s2 = 0.0;
    double last = 0.0;
    std::size_t next = 0;
    const auto n_steps = static_cast<std::size_t>(std::floor(stream.horizon / step + 1e-9));
    out.reserve(n_steps + 1);
    for (std::size_t g = 0; g <= n_steps; ++g) {
        const double t = static_cast<double>(g) * step;
        while (next < stream.size() && stream.events[next].time < t) {
            const auto& e = stream.events[next++];
            const double decay = std::exp(-p.beta * (e.time - last));
            s1 *= decay;
            s2 *= decay;
            last = e.time;
            const double w = excitation_jump(1.0, e.mark, p.eta);
            s1 += (e.side == Side::Up ? p.alpha_s : p.alpha_c) * w;
            s2 += (e.side == Side::Up ? p.alpha_c : p.alpha_s) * w;
        }
        const double decay = std::exp(-p.beta * (t - last));
        const double base = std::exp(-p.beta * t);
        out.push_back({t, {p.mu + (init.up - p.mu) * base + s1 * decay,
                           p.mu + (init.down - p.mu) * base + s2 * decay}});
    }
    return out;
}

StationarityReport stationarity_check(const SymmetricParams& p, double K) {
    const double w = 1.0 + (K - 1.0) * p.eta;
    StationarityReport r;
    r.spectral = w * (p.alpha_s + p.alpha_c) / p.beta;
    r.xi1 = -p.beta + (p.alpha_s - p.alpha_c) * w;
    r.xi2 = -p.beta + (p.alpha_s + p.alpha_c) * w;
    r.stationary = r.spectral < 1.0;
    return r;
}

double expected_intensity(const SymmetricParams& p, double K) {
    const auto st = stationarity_check(p, K);
    if (!st.stationary)
        throw NonstationaryError("spectral value " + std::to_string(st.spectral) + " >= 1");
    const double w = 1.0 + (K - 1.0) * p.eta;
    return p.mu * p.beta / (p.beta - (p.alpha_s + p.alpha_c) * w);
}

} // namespace mhawkes
