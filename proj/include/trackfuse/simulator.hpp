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

#ifndef TRACKFUSE__SIMULATOR_HPP_
#define TRACKFUSE__SIMULATOR_HPP_

#include "trackfuse/geometry.hpp"
#include "trackfuse/metrics.hpp"
#include "trackfuse/tracker.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace trackfuse
{

enum class Weather { normal, rain_sleet, fog_snow };

std::string_view to_string(Weather w);
Weather weather_from_string(std::string_view s);  // throws SchemaError

/// Multipliers a weather preset applies to a scenario's base terms. Zero
/// terms stay zero under every preset.
struct WeatherEffect
{
  double camera_miss_scale{1.0};
  double camera_burst_scale{1.0};
  double camera_noise_scale{1.0};
  double radar_miss_scale{1.0};
  double radar_noise_scale{1.0};
};

WeatherEffect weather_effect(Weather w);

/// Synthetic scenario parameters. Distances in metres, motion per frame.
/// Objects drive along parallel lanes ahead of a static ego sensor rig.
struct ScenarioConfig
{
  std::uint64_t seed{0};
  int frames{200};
  int objects{6};

  // Lane layout. Lane i sits at lateral offset (i - (lanes - 1) / 2) * lane_width
  // and bends as y += 0.5 * curvature * x^2.
  int lanes{3};
  double lane_width{3.5};
  double curvature{0.0};
  double min_range{14.0};
  double max_range{76.0};
  double lane_speed_max{0.08};
  double speed_jitter{0.004};
  double lateral_jitter{0.4};
  double wobble_amplitude{0.15};

  // Camera: lateral sigma is fixed, depth sigma grows linearly with range.
  double camera_pos_std{0.1};
  double camera_depth_std{0.15};
  double camera_depth_std_per_m{0.01};
  double camera_size_std{0.1};
  double camera_heading_std{0.03};
  double camera_occlusion_threshold{0.6};
  double camera_miss_rate{0.04};
  double camera_miss_burst{4.0};
  double camera_fp_rate{0.3};
  double camera_occlusion_score_penalty{0.4};
  int camera_embed_dim{0};
  double camera_embed_noise{0.05};

  // Radar: miss probability grows with the number of objects within
  // radar_clutter_radius.
  double radar_pos_std{0.15};
  double radar_size_std{0.3};
  double radar_heading_std{0.1};
  double radar_clutter_radius{8.0};
  double radar_clutter_miss{0.08};
  double radar_miss_rate{0.04};
  double radar_miss_burst{4.0};
  double radar_fp_rate{0.5};

  double tp_score_min{0.7};
  double fp_score_min{0.1};
  double fp_score_max{0.55};

  Weather weather{Weather::normal};

  CameraModel camera{CameraModel::forward_facing(1.6)};

  /// Noise, dropout and FP terms all zero; detections equal gt with score 1.
  static ScenarioConfig zero_corruption(std::uint64_t seed, int frames, int objects);

  /// Throws SchemaError naming the first invalid field.
  void validate() const;
};

struct ScenarioStats
{
  std::int64_t gt_boxes{0};
  std::int64_t camera_misses{0};
  std::int64_t radar_misses{0};
  std::int64_t camera_fps{0};
  std::int64_t radar_fps{0};
};

struct ScenarioBundle
{
  std::string name;
  std::vector<LabeledFrame> gt;
  std::vector<FrameDetections> camera;
  std::vector<FrameDetections> radar;
  CameraModel camera_model;
  ScenarioConfig config;
  ScenarioStats stats;
};

ScenarioBundle generate(const ScenarioConfig & config);

/// Density presets of the suite.
ScenarioConfig sparse_scenario(std::uint64_t seed);
ScenarioConfig dense_scenario(std::uint64_t seed);

/// Six bundles, {normal, rain_sleet, fog_snow} x {sparse, dense}, in that
/// nesting order. Bundles of equal density share a seed, so weather presets
/// differ only in corruption, not in layout.
std::vector<ScenarioBundle> complementary_suite(std::uint64_t seed);

}  // namespace trackfuse

#endif  // TRACKFUSE__SIMULATOR_HPP_
