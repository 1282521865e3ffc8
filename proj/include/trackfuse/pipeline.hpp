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

#ifndef TRACKFUSE__PIPELINE_HPP_
#define TRACKFUSE__PIPELINE_HPP_

#include "trackfuse/crosscheck.hpp"
#include "trackfuse/fusion.hpp"
#include "trackfuse/tracker.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trackfuse
{

enum class SpawnPolicy {
  strict,   // only cross-confirmed detections start tracklets
  lenient,  // cross-confirmed start active; other confident leftovers start tentative
};

std::string_view to_string(SpawnPolicy p);

struct BoosterConfig
{
  TrackerConfig camera_tracker;
  TrackerConfig radar_tracker;
  CrossCheckConfig crosscheck;
  FusionConfig fusion;

  bool enable_crosscheck_tracklets{true};
  bool enable_crosscheck_detections{true};
  bool update_motion{true};
  bool enable_pairing{true};
  SpawnPolicy spawn_policy{SpawnPolicy::lenient};

  /// Per-modality defaults; camera measurements are noisier in position.
  static BoosterConfig defaults();

  /// Throws SchemaError naming the first invalid field.
  void validate() const;
};

struct FrameOutput
{
  int frame{0};
  std::vector<OutputTrack> fused;
  std::vector<OutputTrack> camera_refined;
  std::vector<OutputTrack> radar_refined;
};

/// Tracks of one modality at one frame, as produced by a standalone tracker.
struct FrameTracks
{
  int frame{0};
  std::vector<OutputTrack> tracks;
};

OutputTrack refined_track(const Tracklet & t);

/// Per-frame orchestration of both trackers, the cross-modality checks and
/// pair fusion. Strictly sequential; frames must increase.
class BoosterPipeline
{
public:
  explicit BoosterPipeline(BoosterConfig config, std::optional<CameraModel> camera = std::nullopt);

  /// Throws FrameRegressionError on non-increasing frames, SchemaError when a
  /// detection's frame differs from `frame` or when the perspective check is
  /// enabled without a camera model.
  FrameOutput process_frame(
    int frame, std::span<const Detection3D> camera_dets, std::span<const Detection3D> radar_dets);

  const Tracker & camera_tracker() const { return camera_; }
  const Tracker & radar_tracker() const { return radar_; }
  const PairRegistry & pairs() const { return pairs_; }
  const BoosterConfig & config() const { return config_; }

private:
  BoosterConfig config_;
  std::optional<CameraModel> camera_model_;
  Tracker camera_;
  Tracker radar_;
  PairRegistry pairs_;
  std::optional<int> last_frame_;
};

/// Folds process_frame over the union of frames present in either stream.
std::vector<FrameOutput> run_pipeline(
  std::span<const FrameDetections> camera, std::span<const FrameDetections> radar,
  const BoosterConfig & config, std::optional<CameraModel> camera_model = std::nullopt);

/// Standalone single-modality tracking: confident unmatched detections start
/// tentative tracklets. Reference behaviour for the refined streams.
std::vector<FrameTracks> run_single_modality(
  std::span<const FrameDetections> stream, const TrackerConfig & config, Modality modality);

}  // namespace trackfuse

#endif  // TRACKFUSE__PIPELINE_HPP_
