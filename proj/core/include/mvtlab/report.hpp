#pragma once

#include <string>
#include <vector>

#include "mvtlab/config.hpp"
#include "mvtlab/evaluator.hpp"
#include "mvtlab/evolution.hpp"
#include "mvtlab/harness.hpp"

namespace mvt {

/// `traffic,method,mean,lo,hi`, one row per (traffic, method) in series order.
std::string render_csv(const ResultSeries& series);
void emit_csv(const ResultSeries& series, const std::string& path);

/// Standalone SVG: log-scaled traffic axis, one shaded interval band and one
/// mean polyline per method, with a legend. Throws std::invalid_argument on
/// an empty series.
std::string render_svg(const ResultSeries& series);
void emit_svg(const ResultSeries& series, const std::string& path);

/// `generation,slot,lineage,genome,impressions,conversions,true_cr`; the
/// control appears as slot "control" with its per-generation traffic.
std::string render_generation_csv(const EvolutionResult& run, const Evaluator& evaluator);

/// JSON run manifest: tool version, seed, config text and hash, outputs.
std::string render_manifest(const ExperimentConfig& config, const std::vector<std::string>& outputs);

/// Writes `text` to `path`, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_text_file(const std::string& path, const std::string& text);

std::string tool_version();

}  // namespace mvt
