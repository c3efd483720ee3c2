#pragma once

// Slow, obviously-correct reference implementations used to check the fast paths.

#include "mhawkes/core.hpp"
#include "mhawkes/random.hpp"
#include "mhawkes/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using namespace mhawkes;

/// Direct double sum of the kernel over all earlier events.
inline IntensityState intensity(const EventStream& s, const FullParams& p, double t, bool left = true) {
    const IntensityState init = s.initial_intensity.value_or(IntensityState{p.mu1, p.mu2});
    double l1 = p.mu1 + (init.up - p.mu1) * std::exp(-p.beta11 * t);
    double l2 = p.mu2 + (init.down - p.mu2) * std::exp(-p.beta22 * t);
    for (const auto& e : s.events) {
        if (left ? e.time >= t : e.time > t) break;
        const double w = 1.0 + (e.mark - 1) * p.eta;
        const double dt = t - e.time;
        if (e.side == Side::Up) {
            l1 += p.alpha11 * w * std::exp(-p.beta11 * dt);
            l2 += p.alpha21 * w * std::exp(-p.beta21 * dt);
        } else {
            l1 += p.alpha12 * w * std::exp(-p.beta12 * dt);
            l2 += p.alpha22 * w * std::exp(-p.beta22 * dt);
        }
    }
    return {l1, l2};
}

inline IntensityState intensity(const EventStream& s, const SymmetricParams& p, double t, bool left = true) {
    return intensity(s, FullParams::from_symmetric(p), t, left);
}

/// Adaptive Simpson on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 60) {
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) +
                   rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Integral of the total intensity over [0, T], piece by piece between events
/// so the integrand is smooth on every subinterval.
inline double compensator(const EventStream& s, const FullParams& p, double T, double tol = 1e-12) {
    std::vector<double> cuts{0.0};
    for (const auto& e : s.events)
        if (e.time < T) cuts.push_back(e.time);
    cuts.push_back(T);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        // The right limit at the left cut includes the jump of the event sitting there.
        auto f = [&](double u) {
            const bool at_cut = u == cuts[i] && i > 0;
            return intensity(s, p, u, !at_cut).total();
        };
        const double piece_tol = tol * (cuts[i + 1] - cuts[i]) / std::max(T, 1e-300);
        total += integrate(f, cuts[i], cuts[i + 1], piece_tol);
    }
    return total;
}

/// O(n^2) log L_g with the compensator in closed form summed event by event.
inline double log_likelihood(const EventStream& s, const FullParams& p) {
    double ll = 0.0;
    for (const auto& e : s.events) ll += std::log(intensity(s, p, e.time).of(e.side));
    const IntensityState init = s.initial_intensity.value_or(IntensityState{p.mu1, p.mu2});
    const double T = s.horizon;
    auto G = [](double b, double tau) { return (1.0 - std::exp(-b * tau)) / b; };
    double comp = p.mu1 * T + (init.up - p.mu1) * G(p.beta11, T) + p.mu2 * T +
                  (init.down - p.mu2) * G(p.beta22, T);
    for (const auto& e : s.events) {
        const double w = 1.0 + (e.mark - 1) * p.eta;
        const double tau = T - e.time;
        if (e.side == Side::Up)
            comp += p.alpha11 * w * G(p.beta11, tau) + p.alpha21 * w * G(p.beta21, tau);
        else
            comp += p.alpha12 * w * G(p.beta12, tau) + p.alpha22 * w * G(p.beta22, tau);
    }
    return ll - comp;
}

inline double log_likelihood(const EventStream& s, const SymmetricParams& p) {
    return log_likelihood(s, FullParams::from_symmetric(p));
}

/// Random stream with uniform times and geometric-ish marks.
inline EventStream random_stream(std::size_t n, double horizon, std::uint64_t seed, int max_mark = 4) {
    Rng rng(seed);
    std::vector<double> times(n);
    for (auto& t : times) t = rng.uniform() * horizon;
    std::sort(times.begin(), times.end());
    EventStream s;
    s.horizon = horizon;
    double last = -1.0;
    for (double t : times) {
        if (!(t > last)) continue;
        last = t;
        const Side side = rng.uniform() < 0.5 ? Side::Up : Side::Down;
        int k = 1;
        while (k < max_mark && rng.uniform() < 0.35) ++k;
        s.events.push_back({t, side, k});
    }
    return s;
}

/// Kolmogorov-Smirnov statistic of samples against Exp(rate).
inline double ks_exponential(std::vector<double> xs, double rate) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = 1.0 - std::exp(-rate * xs[i]);
        d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    return d;
}

} // namespace oracle
