#include "mhawkes/volatility.hpp"

#include "mhawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mhawkes {

KStatistics KStatistics::iid(double e_lambda, double K, double K2) {
    return from_ratios(KRatios<double>::iid(e_lambda, K, K2));
}

KStatistics KStatistics::from_ratios(const KRatios<double>& r) {
    KStatistics ks;
    ks.e_lambda = r.e_lambda;
    ks.e_k_lambda = r.k * r.e_lambda;
    ks.e_k2_lambda = r.k2 * r.e_lambda;
    ks.e_lambda_sq = 1.0;
    ks.e_k_lambda_sq = r.k_lambda_sq;
    ks.c_lambda_n = 1.0;
    ks.c_k_lambda_n = r.k_lambda_n;
    ks.e_lambda_cross = 1.0;
    ks.e_k_lambda_cross = r.k_lambda_cross;
    ks.c_lambda_n_cross = 1.0;
    ks.c_k_lambda_n_cross = r.k_lambda_n_cross;
    return ks;
}

KStatistics average(std::span<const KStatistics> samples) {
    if (samples.empty()) throw DegenerateError("no samples to average");
    KStatistics out;
    for (const auto& s : samples) {
        out.e_lambda += s.e_lambda;
        out.e_k_lambda += s.e_k_lambda;
        out.e_k2_lambda += s.e_k2_lambda;
        out.e_lambda_sq += s.e_lambda_sq;
        out.e_k_lambda_sq += s.e_k_lambda_sq;
        out.c_lambda_n += s.c_lambda_n;
        out.c_k_lambda_n += s.c_k_lambda_n;
        out.e_lambda_cross += s.e_lambda_cross;
        out.e_k_lambda_cross += s.e_k_lambda_cross;
        out.c_lambda_n_cross += s.c_lambda_n_cross;
        out.c_k_lambda_n_cross += s.c_k_lambda_n_cross;
    }
    const double n = static_cast<double>(samples.size());
    for (double* f : {&out.e_lambda, &out.e_k_lambda, &out.e_k2_lambda, &out.e_lambda_sq,
                      &out.e_k_lambda_sq, &out.c_lambda_n, &out.c_k_lambda_n, &out.e_lambda_cross,
                      &out.e_k_lambda_cross, &out.c_lambda_n_cross, &out.c_k_lambda_n_cross})
        *f /= n;
    return out;
}

KStatistics estimate_k_statistics(const EventStream& stream, const IntensityPath& path, double T) {
    if (stream.empty()) throw DegenerateError("K statistics need at least one event");
    if (path.size() != stream.size()) throw InvalidParameter("intensity path does not match the stream");
    if (!(T > 0.0)) throw InvalidParameter("K statistics need a positive horizon");
    // Mark-weighted counts N_i(u-) per side.
    double n[2] = {0.0, 0.0};
    KStatistics s;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto& e = stream.events[i];
        const int own = index_of(e.side);
        const double k = e.mark;
        const double l_own = path[i].of(e.side);
        const double l_oth = path[i].of(other(e.side));
        s.e_lambda += 1.0;
        s.e_k_lambda += k;
        s.e_k2_lambda += k * k;
        s.e_lambda_sq += l_own;
        s.e_k_lambda_sq += k * l_own;
        s.e_lambda_cross += l_oth;
        s.e_k_lambda_cross += k * l_oth;
        s.c_lambda_n += n[own];
        s.c_k_lambda_n += k * n[own];
        s.c_lambda_n_cross += n[1 - own];
        s.c_k_lambda_n_cross += k * n[1 - own];
        n[own] += k;
    }
    // Both sides are pooled: per-side moments are half of the totals.
    const double a = 1.0 / (2.0 * T);
    const double c = 1.0 / (T * T);
    s.e_lambda *= a;
    s.e_k_lambda *= a;
    s.e_k2_lambda *= a;
    s.e_lambda_sq *= a;
    s.e_k_lambda_sq *= a;
    s.e_lambda_cross *= a;
    s.e_k_lambda_cross *= a;
    s.c_lambda_n *= c;
    s.c_k_lambda_n *= c;
    s.c_lambda_n_cross *= c;
    s.c_k_lambda_n_cross *= c;
    return s;
}

VarianceParts<double> variance_theorem(const SymmetricParams& p, const KStatistics& ks, double t) {
    p.validate();
    return variance_theorem<double>(kernel_of(p), ks.ratios(), t);
}

double variance_approx(const SymmetricParams& p, const KStatistics& ks, double t) {
    p.validate();
    return variance_approx<double>(kernel_of(p), ks.ratios(), t);
}

double variance_iid(const SymmetricParams& p, double e_lambda, double K, double K2, double t) {
    p.validate();
    if (!std::isfinite(K) || !std::isfinite(K2) || K < 1.0 || K2 < K)
        throw InvalidParameter("mark moments must satisfy 1 <= E[k] <= E[k^2] < inf");
    return variance_iid<double>(kernel_of(p), e_lambda, K, K2, t);
}

double hawkes_volatility(const SymmetricParams& p, const KStatistics& ks, double s0, double delta,
                         double horizon, double scaling, VarianceVariant variant) {
    if (!(s0 > 0.0) || !(delta > 0.0)) throw InvalidParameter("s0 and delta must be positive");
    if (!(horizon >= 0.0)) throw InvalidParameter("horizon must be nonnegative");
    double v = 0.0;
    switch (variant) {
    case VarianceVariant::Full: v = variance_theorem(p, ks, horizon).e_diff_sq; break;
    case VarianceVariant::Approx: v = variance_approx(p, ks, horizon); break;
    case VarianceVariant::Iid: v = variance_iid(p, ks.e_lambda, ks.k1(), ks.k2(), horizon); break;
    }
    if (v < 0.0) throw DegenerateError("negative count-difference variance");
    return std::sqrt(delta * delta / (s0 * s0) * v) * scaling;
}

PricePath price_path(const EventStream& stream, double s0, double delta) {
    PricePath path;
    path.horizon = stream.horizon;
    path.points.reserve(stream.size() + 1);
    path.points.push_back({0.0, s0});
    long long ticks = 0;
    for (const auto& e : stream.events) {
        ticks += sign_of(e.side) * e.mark;
        path.points.push_back({e.time, s0 + delta * static_cast<double>(ticks)});
    }
    return path;
}

double tsrv(const PricePath& path, double small_scale, double large_scale) {
    if (!(small_scale > 0.0) || !(large_scale >= small_scale))
        throw InvalidParameter("TSRV scales must satisfy 0 < small <= large");
    if (path.points.empty() || path.horizon < large_scale)
        throw InsufficientData("price path shorter than one large-scale interval");
    const auto n = static_cast<std::size_t>(std::floor(path.horizon / small_scale + 1e-9));
    const auto J = static_cast<std::size_t>(std::llround(large_scale / small_scale));
    if (n < J || J == 0) throw InsufficientData("too few small-scale returns");

    std::vector<double> x(n + 1);
    std::size_t j = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * small_scale;
        while (j + 1 < path.points.size() && path.points[j + 1].time <= t) ++j;
        x[i] = path.points[j].price;
    }
    // Differences against the first price keep the sums invariant to a level shift.
    const double level = x[0];
    for (double& v : x) v -= level;
    double rv_small = 0.0;
    for (std::size_t i = 1; i <= n; ++i) rv_small += (x[i] - x[i - 1]) * (x[i] - x[i - 1]);
    double rv_large = 0.0;
    for (std::size_t i = J; i <= n; ++i) rv_large += (x[i] - x[i - J]) * (x[i] - x[i - J]);
    rv_large /= static_cast<double>(J);
    const double nd = static_cast<double>(n);
    const double nbar = (nd - static_cast<double>(J) + 1.0) / static_cast<double>(J);
    return std::sqrt(std::max(0.0, rv_large - nbar / nd * rv_small));
}

VolatilityReport volatility_report(const EventStream& stream, const SymmetricParams& p,
                                   const KStatistics& ks, const ReportOptions& o) {
    VolatilityReport r;
    r.horizon = stream.horizon;
    r.s0 = o.s0;
    r.delta = o.delta;
    r.scaling = o.scaling;
    auto variant = [&](VarianceVariant v) {
        try {
            return hawkes_volatility(p, ks, o.s0, o.delta, stream.horizon, o.scaling, v);
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    r.hawkes_full = variant(VarianceVariant::Full);
    r.hawkes_approx = variant(VarianceVariant::Approx);
    r.hawkes_iid = variant(VarianceVariant::Iid);
    r.tsrv = tsrv(price_path(stream, o.s0, o.delta), o.small_scale, o.large_scale) / o.s0 * o.scaling;
    return r;
}

std::vector<CumulativePoint> intraday_cumulative(const EventStream& stream, const SymmetricParams& p,
                                                 const IntradayOptions& o) {
    if (stream.empty()) throw DegenerateError("intraday volatility needs events");
    if (!(o.window > 0.0)) throw InvalidParameter("window must be positive");
    if (!(o.s0 > 0.0) || !(o.delta > 0.0)) throw InvalidParameter("s0 and delta must be positive");
    p.validate();
    const double T = stream.horizon;

    // Window groups as [begin, end) index ranges over the events.
    struct Group {
        double from, to;
        std::size_t first, last;
    };
    std::vector<double> edges{0.0};
    while (edges.back() + o.window < T * (1.0 - 1e-12)) edges.push_back(edges.back() + o.window);
    edges.push_back(T);
    std::vector<Group> groups;
    std::size_t idx = 0;
    for (std::size_t w = 0; w + 1 < edges.size(); ++w) {
        const double to = edges[w + 1];
        const bool last_window = w + 2 == edges.size();
        std::size_t end = idx;
        while (end < stream.size() && (stream.events[end].time < to || last_window)) ++end;
        const bool short_previous =
            !groups.empty() && groups.back().last - groups.back().first < o.min_events;
        if (short_previous) {
            groups.back().to = to;
            groups.back().last = end;
        } else {
            groups.push_back({edges[w], to, idx, end});
        }
        idx = end;
    }
    if (groups.size() > 1 && groups.back().last - groups.back().first < o.min_events) {
        const Group tail = groups.back();
        groups.pop_back();
        groups.back().to = tail.to;
        groups.back().last = tail.last;
    }

    const IntensityPath day_path = infer_intensity(stream, p);
    const double scale = o.delta * o.delta / (o.s0 * o.s0);
    std::vector<CumulativePoint> out;
    double total = 0.0;
    for (const auto& g : groups) {
        EventStream sub;
        sub.horizon = g.to - g.from;
        std::vector<IntensityState> lambdas;
        for (std::size_t i = g.first; i < g.last; ++i) {
            const auto& e = stream.events[i];
            sub.events.push_back({e.time - g.from, e.side, e.mark});
            lambdas.push_back(day_path[i]);
        }
        double var = 0.0;
        if (!sub.empty() && sub.horizon > 0.0) {
            SymmetricParams pw = p;
            IntensityPath path(std::move(lambdas));
            if (o.mode == WindowMode::Refit) {
                try {
                    pw = fit_symmetric(sub, p).params;
                    path = infer_intensity(sub, pw);
                } catch (const DegenerateError&) {
                    // Too few events on one side: keep the day-level parameters.
                }
            }
            const KStatistics ks = estimate_k_statistics(sub, path, sub.horizon);
            var = scale * variance_approx(pw, ks, sub.horizon);
        }
        total += var;
        out.push_back({g.to, var, std::sqrt(std::max(total, 0.0))});
    }
    return out;
}

} // namespace mhawkes
