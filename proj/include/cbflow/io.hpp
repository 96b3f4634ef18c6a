#pragma once

#include "cbflow/cb_builder.hpp"
#include "cbflow/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace cbflow {

// Shortest decimal round-trip representation of a double ("%.17g" trimmed),
// used everywhere so identical runs produce byte-identical files.
std::string fmt(double x);

// Two-column "s u" text with '#'-prefixed header lines carrying the cap
// parameters.
void write_profile(std::ostream& os, const RadialProfile& p);
RadialProfile read_profile(std::istream& is);
void save_profile(const std::string& path, const RadialProfile& p);
RadialProfile load_profile(const std::string& path);

// Checkpoint container: "== t <time>" record separators, each followed by a
// profile block; an optional "== params" block carries the CBParams.
struct Checkpoint {
    std::vector<double> times;
    std::vector<RadialProfile> profiles;
    bool has_params = false;
    CBParams params;
};

void write_checkpoint(std::ostream& os, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint to_checkpoint(const FlowSeries& fs);

// Diagnostics table with the fixed column set; NaN noose columns are left
// empty.
void write_diagnostics_csv(std::ostream& os, const FlowSeries& fs);
void save_diagnostics_csv(const std::string& path, const FlowSeries& fs);

nlohmann::json params_to_json(const CBParams& p);
CBParams params_from_json(const nlohmann::json& j);

// Serializes with sorted keys and round-trip number formatting.
void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

}  // namespace cbflow
