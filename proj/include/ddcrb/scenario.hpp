#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ddcrb/echo.hpp"
#include "ddcrb/types.hpp"
#include "ddcrb/validate.hpp"

namespace ddcrb {

inline constexpr const char* kToolVersion = "1.0.0";

// Pilot placement on the TF grid.
struct PilotUniformUnit {
    bool operator==(const PilotUniformUnit&) const = default;
};
struct PilotSinglePilot {
    int n = 0;
    int i = 0;
    bool operator==(const PilotSinglePilot&) const = default;
};
struct PilotCustomFile {
    std::string path;  // CSV rows: n,i,re,im
    bool operator==(const PilotCustomFile&) const = default;
};
using PilotSpec = std::variant<PilotUniformUnit, PilotSinglePilot, PilotCustomFile>;

// RSMA experiment block; channel/precoder realizations derive from
// precoder_seed with fixed offsets.
struct RsmaConfig {
    int users = 1;
    double sigma_n_sq = 1.0;
    double sigma_e_sq = 0.0;
    std::vector<double> theta;  // one ISIC factor per user
    std::uint64_t precoder_seed = 1;
    int paths = 4;              // DD channel paths
    double total_power = 2.0;   // split between common and private streams

    bool operator==(const RsmaConfig&) const = default;
};

struct Scenario {
    OtfsGrid grid;
    EchoParams echo;
    PilotSpec pilot = PilotUniformUnit{};
    std::optional<RsmaConfig> rsma;
    std::optional<McConfig> mc;

    bool operator==(const Scenario&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/**
 * Read flat `section.key = value` pairs. Blank lines and `#` comments are
 * skipped; later occurrences of a key override earlier ones. Throws on
 * malformed lines.
 */
KeyValues read_key_values(std::istream& in);

/**
 * Validate and assemble a Scenario. Unknown keys and constraint
 * violations throw std::invalid_argument naming the offending key.
 */
Scenario scenario_from_key_values(const KeyValues& kv);

Scenario parse_scenario(const std::string& path);

// Materialize the pilot as TF symbols (reads the file for custom pilots).
TfSymbols build_pilot(const PilotSpec& pilot, const OtfsGrid& grid);

/**
 * Emit the fully resolved scenario as a manifest that is itself a valid
 * scenario file (comment lines carry tool version and, optionally, a
 * timestamp). Re-parsing it reproduces the Scenario exactly.
 */
void write_manifest(std::ostream& out, const Scenario& s, bool with_timestamp = true);

}  // namespace ddcrb
