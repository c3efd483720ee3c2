#pragma once

#include "mhawkes/types.hpp"

#include <vector>

namespace mhawkes {

/// Normalized linear impact g(k) = (1 + (k-1) eta) / (1 + (E[k]-1) eta).
[[nodiscard]] double impact(int k, double eta, double mean_mark);

/// Intensity jump alpha * (1 + (k-1) eta) caused by an event of mark k.
[[nodiscard]] double excitation_jump(double alpha, int k, double eta);

/// Initial intensity of a stream, falling back to the baseline.
[[nodiscard]] IntensityState initial_state(const EventStream& stream, const SymmetricParams& p);

/// Ground intensities at time t. LeftLimit excludes an event located exactly
/// at t; RightLimit includes its jump. Throws RangeError for t outside
/// [0, horizon].
[[nodiscard]] IntensityState intensity_at(const EventStream& stream, const SymmetricParams& p,
                                          double t, Limit convention = Limit::Left);

/// Same evaluation for the fully characterized model. The initial excess of
/// component i decays at beta_ii.
[[nodiscard]] IntensityState intensity_at(const EventStream& stream, const FullParams& p, double t,
                                          Limit convention = Limit::Left);

/// Left-limit intensities at each event of a stream, plus grid evaluation.
class IntensityPath {
public:
    IntensityPath() = default;
    explicit IntensityPath(std::vector<IntensityState> at_events)
        : at_events_(std::move(at_events)) {}

    [[nodiscard]] const std::vector<IntensityState>& at_events() const noexcept { return at_events_; }
    [[nodiscard]] const IntensityState& operator[](std::size_t i) const { return at_events_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return at_events_.size(); }

private:
    std::vector<IntensityState> at_events_;
};

/// O(n) recursion producing lambda(t_n-) for every event.
[[nodiscard]] IntensityPath infer_intensity(const EventStream& stream, const SymmetricParams& p);
[[nodiscard]] IntensityPath infer_intensity(const EventStream& stream, const FullParams& p);

struct GridPoint {
    double time;
    IntensityState lambda;
};

/// Left-limit intensities on the grid 0, step, 2 step, ... <= horizon.
[[nodiscard]] std::vector<GridPoint> intensity_on_grid(const EventStream& stream,
                                                       const SymmetricParams& p, double step);

struct StationarityReport {
    bool stationary{false};
    double spectral{0.0}; ///< {1+(K-1)eta}(alpha_s+alpha_c)/beta
    double xi1{0.0};      ///< eigenvalue on the (-1, 1) direction
    double xi2{0.0};      ///< eigenvalue on the (1, 1) direction
};

/// Stationarity condition and eigenvalues of the mean-intensity ODE, with
/// K = K_{1 lambda} the mark-intensity moment ratio.
[[nodiscard]] StationarityReport stationarity_check(const SymmetricParams& p, double K);

/// Long-run E[lambda_g] = mu beta / (beta - (alpha_s+alpha_c){1+(K-1)eta}).
/// Throws NonstationaryError when the spectral value is >= 1.
[[nodiscard]] double expected_intensity(const SymmetricParams& p, double K);

} // namespace mhawkes
