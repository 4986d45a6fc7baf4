// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "qilab/config.hpp"

namespace qilab {

// Command implementations shared by the CLI binary and the tests. All
// throw Validation/Numeric/IoError; the binary maps those to exit codes.

// Writes heralded signal frames (frame_D_000.pgm, ...) for the D/A/R/L
// triggers plus readout-only dark frames (dark_000.pgm, ...), with JSON
// sidecars, into out_dir.
void cmd_simulate(const ExperimentConfig& cfg, std::uint64_t seed,
                  const std::string& out_dir);

// Builds a calibration from sparse single-photon frames and dark frames
// and writes it as JSON.
void cmd_calibrate(const std::vector<std::string>& frame_paths,
                   const std::vector<std::string>& dark_paths,
                   const ExperimentConfig& cfg, std::uint64_t seed,
                   const std::string& out_path);

// Runs the angular-fringe analysis and witness on simulated frames.
// Writes witness_report.json and per-bin CSVs into out_dir.
WitnessReport cmd_analyze(const ExperimentConfig& cfg,
                          const std::string& frames_dir,
                          const std::string& cal_path,
                          const std::string& out_dir);

// Writes a numbered frame sequence following a path over the trigger
// Poincare sphere, plus scan_summary.json with the measured rotation.
void cmd_scan(const ExperimentConfig& cfg, std::uint64_t seed,
              const std::string& out_dir);

// Renders the heralded intensity for one trigger (or re-scales an input
// frame) to a full-range 16-bit PGM; optionally embeds the theoretical
// intensity as an inset.
void cmd_render(const ExperimentConfig& cfg, const std::string& trigger,
                bool inset, const std::string& frame_in,
                const std::string& out_path);

// Shell-style '*' expansion within one directory component.
std::vector<std::string> expand_glob(const std::string& pattern);

// Heralded density with an optional depolarizing admixture chosen so the
// recovered per-basis visibility matches target_vis (< 0: pure state).
ScalarField heralded_density(const HybridState& state,
                             const PolarizationState& trigger,
                             const GridSpec& grid, double target_vis,
                             double bin_width_deg, double* probability);

void write_witness_report(const WitnessReport& rep, const std::string& path);

}  // namespace qilab
