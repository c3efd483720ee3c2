#pragma once

#include "mhawkes/estimate.hpp"
#include "mhawkes/volatility.hpp"

#include <array>
#include <span>

namespace mhawkes {

struct MeanStd {
    double mean{0.0};
    double std{0.0}; ///< sample standard deviation (n - 1)
    std::size_t n{0};
};

[[nodiscard]] MeanStd mean_std(std::span<const double> xs);

/// Everything the simulation tables need from one path.
struct PathAnalysis {
    FitResult<SymmetricParams> fit;
    KStatistics ks;
    double hawkes_vol{0.0}; ///< return volatility over the path horizon
    double tsrv_vol{0.0};   ///< TSRV / s0
    double terminal_return{0.0};
};

/// Fits the symmetric model, estimates the K statistics from the inferred
/// intensities and evaluates the Hawkes volatility and TSRV.
[[nodiscard]] PathAnalysis analyze_path(const EventStream& stream, const SymmetricParams& init,
                                        const ReportOptions& report = {},
                                        VarianceVariant variant = VarianceVariant::Approx,
                                        const FitOptions& fit = {});

struct EnsembleSummary {
    std::array<MeanStd, 5> params; ///< mu, alpha_s, alpha_c, beta, eta
    MeanStd hawkes;
    MeanStd tsrv;
    double sample_vol{0.0}; ///< sample standard deviation of terminal returns
    std::size_t paths{0};
    std::size_t converged{0};

    /// TSRV < Hawkes vol < sample vol on ensemble means.
    [[nodiscard]] bool regime_ordering() const {
        return tsrv.mean < hawkes.mean && hawkes.mean < sample_vol;
    }
};

/// Throws DegenerateError on an empty ensemble.
[[nodiscard]] EnsembleSummary summarize(std::span<const PathAnalysis> paths);

} // namespace mhawkes
