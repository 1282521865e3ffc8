// Copyright 2026 The trackfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRACKFUSE__CLI_HPP_
#define TRACKFUSE__CLI_HPP_

#include "trackfuse/experiment.hpp"
#include "trackfuse/metrics.hpp"
#include "trackfuse/tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

namespace trackfuse
{

inline constexpr const char * kToolVersion = "0.1.0";

namespace fs = std::filesystem;

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

// Each command throws SchemaError (exit 2) or IoError (exit 3) on failure and
// writes a manifest.json next to its outputs.

struct SimulateArgs
{
  std::optional<fs::path> config;
  fs::path out_dir;
  std::optional<std::uint64_t> seed;  // overrides the config file
};
void cmd_simulate(const SimulateArgs & args);

struct TrackArgs
{
  fs::path detections;
  Modality modality{Modality::camera};
  std::optional<fs::path> config;
  fs::path out_dir;
};
/// Standalone tracker; writes <modality>_tracks.jsonl.
void cmd_track(const TrackArgs & args);

struct BoostArgs
{
  fs::path camera;
  fs::path radar;
  std::optional<fs::path> calib;
  std::optional<fs::path> config;
  fs::path out_dir;
};
/// Writes fused.jsonl, camera_refined.jsonl and radar_refined.jsonl.
void cmd_boost(const BoostArgs & args);

struct EvalArgs
{
  fs::path gt;
  fs::path tracks;
  std::optional<SliceAxis> slice;
  std::optional<fs::path> calib;
  double max_distance{kDefaultMatchDistance};
  std::optional<fs::path> out;  // stdout when absent
};
/// Report JSON, or a per-bin CSV when sliced. Returns the text written.
std::string cmd_eval(const EvalArgs & args);

struct AblateArgs
{
  std::uint64_t seed{42};
  AblationAxis axis{AblationAxis::crosscheck};
  std::optional<fs::path> config;
  std::optional<fs::path> out;  // stdout when absent
};
std::string cmd_ablate(const AblateArgs & args);

/// Re-executes the simulate or boost run recorded in a manifest into
/// `out_dir`. Inputs are re-read from the recorded paths and must still hash
/// to the recorded values.
void cmd_rerun(const fs::path & manifest, const fs::path & out_dir);

SliceAxis slice_axis_from_string(std::string_view s);  // throws SchemaError
Modality modality_from_string(std::string_view s);     // throws SchemaError

/// Runs `body`, printing any error to `err`; returns 0, 2 (schema), 3 (I/O)
/// or 1 (anything else).
int guarded(const std::function<void()> & body, std::ostream & err);

}  // namespace trackfuse

#endif  // TRACKFUSE__CLI_HPP_
