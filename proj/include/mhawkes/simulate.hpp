#pragma once

#include "mhawkes/core.hpp"
#include "mhawkes/random.hpp"
#include "mhawkes/types.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mhawkes {

struct ConstantOneMarks {};

/// I.i.d. marks from a pmf; pmf[0] is P(k = 1).
struct EmpiricalMarks {
    std::vector<double> pmf;
};

/// Geometric marks with conditional mean min(d + c * lambda, U).
struct ConditionalGeometricMarks {
    double c{0.0};
    double d{1.0};
    double U{1.0};
};

using MarkSampler = std::variant<ConstantOneMarks, EmpiricalMarks, ConditionalGeometricMarks>;

/// Throws InvalidParameter on an unnormalized pmf or an inadmissible (c, d, U).
void validate(const MarkSampler& sampler);

/// Upper bound on K_{1 lambda} used for the stationarity warning.
[[nodiscard]] double conservative_mark_bound(const MarkSampler& sampler);

/// Draws a mark given the accepting component's left-limit intensity.
[[nodiscard]] int sample_mark(const MarkSampler& sampler, double lambda, Rng& rng);

struct Segment {
    double duration{0.0};
    SymmetricParams params;
    MarkSampler sampler;
};

/// Piecewise-constant parameter schedule. Parameters switch instantaneously at
/// segment boundaries while the intensity state carries over.
struct Scenario {
    std::vector<Segment> segments;

    [[nodiscard]] static Scenario constant(const SymmetricParams& p, const MarkSampler& s,
                                           double horizon) {
        return Scenario{{Segment{horizon, p, s}}};
    }
    [[nodiscard]] double total_duration() const;
};

/// One message per segment whose spectral value under the conservative mark
/// bound is at least one.
[[nodiscard]] std::vector<std::string> stationarity_warnings(const Scenario& scenario);
/// The same check on the Perron root of the full model's branching matrix.
[[nodiscard]] std::vector<std::string> stationarity_warnings(const FullParams& p, const MarkSampler& sampler);

struct SimulationOptions {
    double blowup_guard{1e6};
    /// Seconds simulated under the first segment before time zero; the events
    /// are discarded and the intensity state is carried into the session.
    double burn_in{0.0};
    /// Initial intensity at time zero (ignored when burn_in > 0).
    std::optional<IntensityState> initial;
};

struct SimulationResult {
    EventStream stream;
    IntensityPath intensity; ///< left-limit intensities under the true parameters
    std::vector<std::string> warnings;
};

[[nodiscard]] SimulationResult simulate_path(const Scenario& scenario, double horizon, Rng& rng,
                                             const SimulationOptions& options = {});
[[nodiscard]] SimulationResult simulate_path(const Scenario& scenario, double horizon,
                                             std::uint64_t seed,
                                             const SimulationOptions& options = {});

[[nodiscard]] SimulationResult simulate_full(const FullParams& params, const MarkSampler& sampler,
                                             double horizon, Rng& rng,
                                             const SimulationOptions& options = {});
[[nodiscard]] SimulationResult simulate_full(const FullParams& params, const MarkSampler& sampler,
                                             double horizon, std::uint64_t seed,
                                             const SimulationOptions& options = {});

} // namespace mhawkes
