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

#ifndef TRACKFUSE__EXPERIMENT_HPP_
#define TRACKFUSE__EXPERIMENT_HPP_

#include "trackfuse/metrics.hpp"
#include "trackfuse/pipeline.hpp"
#include "trackfuse/simulator.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trackfuse
{

std::vector<LabeledFrame> to_labeled(std::span<const FrameTracks> tracks);

enum class OutputStream { fused, camera_refined, radar_refined };

std::vector<FrameTracks> select_stream(std::span<const FrameOutput> outputs, OutputStream which);

/// Everything measured on one scenario.
struct ScenarioResult
{
  std::string name;
  MotReport camera_baseline;
  MotReport radar_baseline;
  MotReport fused;
  MotReport camera_refined;
  MotReport radar_refined;
};

ScenarioResult run_scenario(const ScenarioBundle & bundle, const BoosterConfig & config);

/// Runs every bundle, optionally on parallel tasks. Result order follows input.
std::vector<ScenarioResult> run_suite(
  std::span<const ScenarioBundle> suite, const BoosterConfig & config, bool parallel = true);

/// Sums the counts of several reports and recomputes the ratios.
MotReport pooled(std::span<const MotReport> reports);

enum class AblationAxis { crosscheck, pairing, weighting };

AblationAxis ablation_axis_from_string(std::string_view s);  // throws SchemaError
std::string_view to_string(AblationAxis a);

struct AblationVariant
{
  std::string label;
  BoosterConfig config;
};

/// Crosscheck rows: (tracklets, detections, update) = off/off/off,
/// off/on/on, on/off/on, on/on/off, on/on/on.
std::vector<AblationVariant> ablation_variants(AblationAxis axis, const BoosterConfig & base);

struct AblationRow
{
  std::string label;
  MotReport fused;
};

std::vector<AblationRow> run_ablation(
  std::uint64_t seed, AblationAxis axis, const BoosterConfig & base);

/// CSV with header axis,config,idf1,mota,fp,fn,ids; ratios in percent with
/// one decimal.
std::string ablation_csv(AblationAxis axis, std::span<const AblationRow> rows);

}  // namespace trackfuse

#endif  // TRACKFUSE__EXPERIMENT_HPP_
