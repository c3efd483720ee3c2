#pragma once

#include "mhawkes/estimate.hpp"
#include "mhawkes/types.hpp"
#include "mhawkes/volatility.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace mhawkes {

using Json = nlohmann::ordered_json;

/// CSV `time,direction,mark` with direction up/down and times at full precision.
void write_stream_csv(std::ostream& out, const EventStream& stream);

/// Reads the CSV body; the horizon and initial intensity come from the caller.
[[nodiscard]] EventStream read_stream_csv(std::istream& in, double horizon);

/// Writes `path` and a `path.json` sidecar holding the horizon and the
/// optional initial intensity.
void save_stream(const std::filesystem::path& path, const EventStream& stream);

/// Loads a stream saved by save_stream. Without a sidecar the horizon must be given.
[[nodiscard]] EventStream load_stream(const std::filesystem::path& path,
                                      std::optional<double> horizon = std::nullopt);

[[nodiscard]] Json to_json(const SymmetricParams& p);
[[nodiscard]] Json to_json(const FullParams& p);
[[nodiscard]] Json to_json(const FitResult<SymmetricParams>& r);
[[nodiscard]] Json to_json(const FitResult<FullParams>& r);
[[nodiscard]] Json to_json(const KStatistics& ks);
[[nodiscard]] Json to_json(const VolatilityReport& r);

/// Missing keys keep the values of `base`.
[[nodiscard]] SymmetricParams symmetric_from_json(const Json& j, SymmetricParams base = {});
[[nodiscard]] FullParams full_from_json(const Json& j, FullParams base = {});

} // namespace mhawkes
