#include "mhawkes/ensemble.hpp"

#include "mhawkes/core.hpp"
#include "mhawkes/errors.hpp"

#include <cmath>
#include <vector>

namespace mhawkes {

MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    out.n = xs.size();
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

PathAnalysis analyze_path(const EventStream& stream, const SymmetricParams& init,
                          const ReportOptions& report, VarianceVariant variant, const FitOptions& fit) {
    PathAnalysis a;
    a.fit = fit_symmetric(stream, init, {}, fit);
    const IntensityPath path = infer_intensity(stream, a.fit.params);
    a.ks = estimate_k_statistics(stream, path, stream.horizon);
    a.hawkes_vol = hawkes_volatility(a.fit.params, a.ks, report.s0, report.delta, stream.horizon,
                                     report.scaling, variant);
    const PricePath prices = price_path(stream, report.s0, report.delta);
    a.tsrv_vol = tsrv(prices, report.small_scale, report.large_scale) / report.s0 * report.scaling;
    a.terminal_return = (prices.end() - prices.start()) / report.s0;
    return a;
}

EnsembleSummary summarize(std::span<const PathAnalysis> paths) {
    if (paths.empty()) throw DegenerateError("empty ensemble");
    EnsembleSummary s;
    s.paths = paths.size();
    std::vector<double> col(paths.size());
    auto column = [&](auto get) {
        for (std::size_t i = 0; i < paths.size(); ++i) col[i] = get(paths[i]);
        return mean_std(col);
    };
    s.params[0] = column([](const PathAnalysis& a) { return a.fit.params.mu; });
    s.params[1] = column([](const PathAnalysis& a) { return a.fit.params.alpha_s; });
    s.params[2] = column([](const PathAnalysis& a) { return a.fit.params.alpha_c; });
    s.params[3] = column([](const PathAnalysis& a) { return a.fit.params.beta; });
    s.params[4] = column([](const PathAnalysis& a) { return a.fit.params.eta; });
    s.hawkes = column([](const PathAnalysis& a) { return a.hawkes_vol; });
    s.tsrv = column([](const PathAnalysis& a) { return a.tsrv_vol; });
    // Returns have mean zero under the symmetric model, but the sample mean is still removed.
    s.sample_vol = column([](const PathAnalysis& a) { return a.terminal_return; }).std;
    for (const auto& a : paths) s.converged += a.fit.converged ? 1 : 0;
    return s;
}

} // namespace mhawkes
