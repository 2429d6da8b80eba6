#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "coarse/ideals.hpp"
#include "coarse/localization.hpp"
#include "coarse/property_a.hpp"
#include "coarse/spectra.hpp"

namespace coarse::io {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point value at 17 significant digits so
/// doubles round-trip. Non-finite values become null.
std::string dump(const Json& value, int indent = 2);

Json read_json(const std::filesystem::path& path);

Complex parse_complex(const Json& j);
Coord parse_coord(const Json& j, int dim);
SpacePtr parse_space(const Json& j, std::optional<int> radius_override = std::nullopt);
Coefficient parse_coefficient(const Json& j);
DirectionProxy parse_proxy(const Json& j, int dim);
/// "1", "-1:0", "2@3" (direction 2, period 3).
DirectionProxy parse_proxy(const std::string& text, int dim);
AsymptoticOperatorSpec parse_asymptotic(const Json& j);

/// Operator documents: kinds hls, identity, adjacency, bands, entries,
/// asymptotic. `window` replaces the lattice radius when set.
BandKernel parse_operator(const Json& j, std::optional<int> window = std::nullopt);

Json to_json(const SpectrumSet& s);
Json to_json(const GhostReport& r);
Json to_json(const TruncationReport& r);

}  // namespace coarse::io
