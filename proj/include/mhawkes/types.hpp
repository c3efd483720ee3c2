#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mhawkes {

/// Direction of a mid-price move. Up events drive N1, Down events drive N2.
enum class Side : std::uint8_t { Up = 0, Down = 1 };

[[nodiscard]] constexpr int index_of(Side s) noexcept { return static_cast<int>(s); }
[[nodiscard]] constexpr Side other(Side s) noexcept { return s == Side::Up ? Side::Down : Side::Up; }
[[nodiscard]] constexpr int sign_of(Side s) noexcept { return s == Side::Up ? 1 : -1; }

/// Symmetric marked Hawkes kernel parameters (mu, alpha_s, alpha_c, beta, eta).
struct SymmetricParams {
    double mu{0.1};      ///< baseline intensity per side, events/sec
    double alpha_s{0.0}; ///< self-excitation scale, 1/sec
    double alpha_c{0.0}; ///< cross-excitation scale, 1/sec
    double beta{1.0};    ///< exponential decay rate, 1/sec
    double eta{0.0};     ///< slope of the linear impact function

    /// Throws InvalidParameter unless mu, beta > 0 and alpha_s, alpha_c >= 0.
    void validate() const;

    friend bool operator==(const SymmetricParams&, const SymmetricParams&) = default;
};

/// Fully characterized (asymmetric) model: four excitation channels, each with
/// its own decay rate. alpha_ij / beta_ij describe the effect of type-j events
/// on the type-i intensity (1 = Up, 2 = Down).
struct FullParams {
    double mu1{0.1};
    double mu2{0.1};
    double alpha11{0.0};
    double alpha22{0.0};
    double alpha12{0.0};
    double alpha21{0.0};
    double beta11{1.0};
    double beta22{1.0};
    double beta12{1.0};
    double beta21{1.0};
    double eta{0.0};

    void validate() const;

    /// Embeds a symmetric parameter set (all betas equal, paired alphas tied).
    [[nodiscard]] static FullParams from_symmetric(const SymmetricParams& p);

    friend bool operator==(const FullParams&, const FullParams&) = default;
};

struct MarkedEvent {
    double time{0.0}; ///< seconds from session open
    Side side{Side::Up};
    int mark{1}; ///< jump size in multiples of the minimum move

    friend bool operator==(const MarkedEvent&, const MarkedEvent&) = default;
};

/// Ground intensities (lambda_g1, lambda_g2).
struct IntensityState {
    double up{0.0};
    double down{0.0};

    [[nodiscard]] double total() const noexcept { return up + down; }
    [[nodiscard]] double of(Side s) const noexcept { return s == Side::Up ? up : down; }
    double& of(Side s) noexcept { return s == Side::Up ? up : down; }

    friend bool operator==(const IntensityState&, const IntensityState&) = default;
};

enum class Limit : std::uint8_t { Left, Right };

/// Ordered marked events on [0, horizon].
struct EventStream {
    std::vector<MarkedEvent> events;
    double horizon{0.0};
    /// (lambda_g1(0), lambda_g2(0)); when absent the baseline (mu, mu) is used.
    std::optional<IntensityState> initial_intensity;

    /// Throws DataIntegrityError on non-increasing times, times outside
    /// [0, horizon] or marks below one.
    void validate() const;

    [[nodiscard]] std::size_t size() const noexcept { return events.size(); }
    [[nodiscard]] bool empty() const noexcept { return events.empty(); }
    [[nodiscard]] std::size_t count(Side s) const noexcept;
    [[nodiscard]] int max_mark() const noexcept;
    [[nodiscard]] double mean_mark() const noexcept;

    /// Events in [from, to), with times shifted so that `from` becomes zero.
    [[nodiscard]] EventStream slice(double from, double to) const;

    friend bool operator==(const EventStream&, const EventStream&) = default;
};

} // namespace mhawkes
