#ifndef CAPSIM_CONFIG_HPP
#define CAPSIM_CONFIG_HPP

#include <string>

#include "json.hpp"

#include "capsim/experiment.hpp"

namespace capsim {

// Parses a JSON config with sections cap / bump / flow / grids / tolerances /
// output (grammar in docs/format.md).  Missing keys take the default
// acceptance-scenario values; an empty file is all defaults.  Unknown keys
// raise ParseError naming the key; invariant violations raise ValidationError
// listing every problem.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Fully-resolved config, suitable for echoing into the output directory.
nlohmann::json emit_config(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json summary_to_json(const RunSummary& s);

// %.17g serialization used by every CSV emitter.
std::string csv_number(double v);

void write_text(const std::string& path, const std::string& text);
void write_series_csv(const std::string& path, const RunSummary& s);
void write_trajectory_csv(const std::string& path, const RunSummary& s,
                          std::uint64_t x0_id, std::uint64_t x1_id);

// Appends one frame of interface nodes to an open snapshot stream.
std::string snapshot_header();
void append_snapshot(std::string& buf, const FrameInfo& fi);

}  // namespace capsim

#endif
