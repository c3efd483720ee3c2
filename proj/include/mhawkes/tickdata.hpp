#pragma once

#include "mhawkes/core.hpp"
#include "mhawkes/types.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mhawkes {

struct QuoteRecord {
    double timestamp{0.0}; ///< seconds since midnight
    double bid{0.0};
    double ask{0.0};

    [[nodiscard]] double mid() const noexcept { return 0.5 * (bid + ask); }
    friend bool operator==(const QuoteRecord&, const QuoteRecord&) = default;
};

enum class TimeFormat { Clock, Epoch };

struct SessionConfig {
    double open{10.0 * 3600.0};  ///< seconds since midnight
    double close{15.5 * 3600.0};
    double delta{0.005}; ///< minimum mid-price move
    double tick{0.01};   ///< quote price grid
    bool subdivide{true};
    TimeFormat time_format{TimeFormat::Clock};

    void validate() const;
};

/// Parses "HH:MM:SS" or "HH:MM:SS.fff" into seconds since midnight.
[[nodiscard]] double parse_clock(const std::string& text);
[[nodiscard]] std::string format_clock(double seconds);

struct QuoteDay {
    long long day{0}; ///< epoch day, or running index for clock timestamps
    std::vector<QuoteRecord> records;
};

struct ParsedQuotes {
    std::vector<QuoteDay> days;
    std::size_t crossed{0};         ///< rows with bid > ask, dropped
    std::size_t outside_session{0}; ///< rows outside [open, close), dropped
};

/// Reads CSV `timestamp,bid,ask`. Clock timestamps start a new day whenever
/// they decrease; epoch timestamps are split on UTC days. Malformed rows
/// throw ParseError with the 1-based line number.
[[nodiscard]] ParsedQuotes parse_quotes(std::istream& in, const SessionConfig& config);

/// Marked mid-price events of one session. Mid moves are counted in units of
/// delta; a move off that grid by more than 1e-6 units throws DataIntegrityError.
[[nodiscard]] EventStream to_mid_events(const std::vector<QuoteRecord>& quotes,
                                        const SessionConfig& config);

/// Spreads m events sharing an integral second s over s + j/(m+1), j = 1..m.
/// Non-integral times are left as they are.
[[nodiscard]] EventStream subdivide_timestamps(const EventStream& stream);

/// Quotes whose mid path reproduces the stream: timestamps are truncated to
/// whole seconds, odd half-tick mids get a one-tick spread and even ones two.
[[nodiscard]] std::vector<QuoteRecord> synthesize_quotes(const EventStream& stream,
                                                         const SessionConfig& config,
                                                         double opening_mid);

void write_quotes(std::ostream& out, const std::vector<QuoteRecord>& quotes, TimeFormat format);

/// Pooled mark pmf in percent.
[[nodiscard]] std::map<int, double> mark_distribution(const EventStream& stream);

enum class WindowSide { Trailing, Leading };
enum class EdgePolicy { Exclude, Clamp };

struct ProxyOptions {
    double tau{10.0};
    WindowSide side{WindowSide::Trailing};
    EdgePolicy edge{EdgePolicy::Exclude};
};

struct ProxyRecord {
    double time;
    Side side;
    int mark;
    double up;
    double down;
    double total;
};

struct ProxyBin {
    int signed_mark;
    std::size_t count;
    double mean_up, se_up;
    double mean_down, se_down;
    double mean_total, se_total;
};

struct ProxyTable {
    std::vector<ProxyRecord> events;
    std::vector<ProxyBin> bins; ///< ordered by signed mark
    std::size_t excluded{0};
};

/// Event counts per unit time in a window of length tau next to each event.
/// Trailing uses [t - tau, t), Leading (t, t + tau]. Exclude drops events whose
/// window leaves [0, T]; Clamp slides the window back inside.
[[nodiscard]] ProxyTable proxy_intensity(const EventStream& stream, const ProxyOptions& options = {});

struct MarkBin {
    int n; ///< bin (n-1, n]
    std::size_t count;
    double mean_mark;
    bool low_count;
};

/// Mean mark conditional on the event-side left-limit intensity binned to
/// unit intervals. Bins with fewer than min_count events are flagged.
[[nodiscard]] std::vector<MarkBin> conditional_mark_mean(const EventStream& stream,
                                                         const IntensityPath& path,
                                                         std::size_t min_count = 100);

} // namespace mhawkes
