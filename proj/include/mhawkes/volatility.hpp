#pragma once

#include "mhawkes/core.hpp"
#include "mhawkes/estimate.hpp"
#include "mhawkes/types.hpp"
#include "mhawkes/variance.hpp"

#include <span>
#include <vector>

namespace mhawkes {

/// Sample moments behind the K ratios, pooled over both sides. Entries are
/// per-side expectations; c_* fields are the limits of E[. N]/t.
struct KStatistics {
    double e_lambda{0.0};      ///< E[lambda_gi]
    double e_k_lambda{0.0};    ///< E[k lambda_gi]
    double e_k2_lambda{0.0};   ///< E[k^2 lambda_gi]
    double e_lambda_sq{0.0};   ///< E[lambda_gi^2]
    double e_k_lambda_sq{0.0}; ///< E[k lambda_gi^2]
    double c_lambda_n{0.0};    ///< E[lambda_gi N_i] / t
    double c_k_lambda_n{0.0};  ///< E[k lambda_gi N_i] / t
    double e_lambda_cross{0.0};   ///< E[lambda_g1 lambda_g2]
    double e_k_lambda_cross{0.0}; ///< E[k_2 lambda_g1 lambda_g2]
    double c_lambda_n_cross{0.0}; ///< E[lambda_gi N_j] / t
    double c_k_lambda_n_cross{0.0};

    [[nodiscard]] double k1() const noexcept { return e_k_lambda / e_lambda; }
    [[nodiscard]] double k2() const noexcept { return e_k2_lambda / e_lambda; }
    [[nodiscard]] double k_lambda_sq() const noexcept { return e_k_lambda_sq / e_lambda_sq; }
    [[nodiscard]] double k_lambda_cross() const noexcept { return e_k_lambda_cross / e_lambda_cross; }
    [[nodiscard]] double k_lambda_n() const noexcept { return c_k_lambda_n / c_lambda_n; }
    [[nodiscard]] double k_lambda_n_cross() const noexcept { return c_k_lambda_n_cross / c_lambda_n_cross; }

    [[nodiscard]] KRatios<double> ratios() const {
        return {e_lambda, k1(), k2(), k_lambda_sq(), k_lambda_cross(), k_lambda_n(), k_lambda_n_cross()};
    }

    /// Every ratio equal to one (unit marks).
    [[nodiscard]] static KStatistics unit(double e_lambda) { return iid(e_lambda, 1.0, 1.0); }
    /// Ratios implied by i.i.d. marks with E[k] = K, E[k^2] = K2.
    [[nodiscard]] static KStatistics iid(double e_lambda, double K, double K2);
    [[nodiscard]] static KStatistics from_ratios(const KRatios<double>& r);
};

/// Averages the raw moments of several equally long samples.
[[nodiscard]] KStatistics average(std::span<const KStatistics> samples);

/// Moment estimators from one stream and its inferred left-limit intensities.
/// Throws DegenerateError on an empty stream and InvalidParameter when the
/// path does not match the stream.
[[nodiscard]] KStatistics estimate_k_statistics(const EventStream& stream, const IntensityPath& path,
                                                double T);

[[nodiscard]] inline Kernel<double> kernel_of(const SymmetricParams& p) {
    return {p.mu, p.alpha_s, p.alpha_c, p.beta, p.eta};
}

[[nodiscard]] VarianceParts<double> variance_theorem(const SymmetricParams& p, const KStatistics& ks,
                                                     double t);
[[nodiscard]] double variance_approx(const SymmetricParams& p, const KStatistics& ks, double t);
[[nodiscard]] double variance_iid(const SymmetricParams& p, double e_lambda, double K, double K2, double t);

enum class VarianceVariant { Full, Approx, Iid };

/// sqrt(delta^2 / s0^2 * E[(N1-N2)^2](horizon)) * scaling.
[[nodiscard]] double hawkes_volatility(const SymmetricParams& p, const KStatistics& ks, double s0,
                                       double delta, double horizon, double scaling = 1.0,
                                       VarianceVariant variant = VarianceVariant::Approx);

struct PricePoint {
    double time;
    double price;
};

/// Mid-price path on [0, horizon]: the opening price followed by one point per event.
struct PricePath {
    std::vector<PricePoint> points;
    double horizon{0.0};

    [[nodiscard]] double start() const { return points.front().price; }
    [[nodiscard]] double end() const { return points.back().price; }
};

/// S_t = s0 + delta * (N1(t) - N2(t)) with mark-weighted counts.
[[nodiscard]] PricePath price_path(const EventStream& stream, double s0, double delta);

/// Two-scale realized volatility in price units. Both scales are in seconds;
/// the path is sampled previous-tick on the small grid. Throws
/// InsufficientData when the horizon is shorter than the large scale.
[[nodiscard]] double tsrv(const PricePath& path, double small_scale = 1.0, double large_scale = 300.0);

struct VolatilityReport {
    double hawkes_full{0.0};
    double hawkes_approx{0.0};
    double hawkes_iid{0.0};
    double tsrv{0.0}; ///< return volatility: TSRV / s0 * scaling
    double horizon{0.0};
    double s0{0.0};
    double delta{0.0};
    double scaling{1.0};
};

struct ReportOptions {
    double s0{100.0};
    double delta{0.005};
    double scaling{1.0};
    double small_scale{1.0};
    double large_scale{300.0};
};

/// All volatility variants for one stream. A Hawkes variant whose formula is
/// undefined for the supplied moments is reported as NaN.
[[nodiscard]] VolatilityReport volatility_report(const EventStream& stream, const SymmetricParams& p,
                                                 const KStatistics& ks, const ReportOptions& options = {});

enum class WindowMode { Reuse, Refit };

struct IntradayOptions {
    double window{600.0};
    double s0{100.0};
    double delta{0.005};
    WindowMode mode{WindowMode::Reuse};
    std::size_t min_events{30};
};

struct CumulativePoint {
    double time;       ///< window end
    double variance;   ///< window variance of the return
    double cumulative; ///< sqrt of the running variance sum
};

/// Cumulative Hawkes volatility updated window by window. Reuse keeps the
/// day-level parameters and recomputes the K statistics per window; Refit fits
/// each window. Windows with fewer than min_events events merge into the next
/// one, and a short tail merges back into the last window.
[[nodiscard]] std::vector<CumulativePoint> intraday_cumulative(const EventStream& stream,
                                                               const SymmetricParams& p,
                                                               const IntradayOptions& options = {});

} // namespace mhawkes
