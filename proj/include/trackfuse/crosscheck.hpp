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

#ifndef TRACKFUSE__CROSSCHECK_HPP_
#define TRACKFUSE__CROSSCHECK_HPP_

#include "trackfuse/fusion.hpp"
#include "trackfuse/geometry.hpp"
#include "trackfuse/tracker.hpp"

#include <map>
#include <span>
#include <vector>

namespace trackfuse
{

struct CrossCheckConfig
{
  double occlusion_threshold{0.5};      // image overlap fraction that discards a radar detection
  double image_iou_gate{0.3};           // minimum image IoU for radar->camera confirmation
  double bev_occlusion_threshold{0.3};  // BEV IoU that discards a camera detection
  double diou_gate{0.9};                // maximum DIoU for camera->radar confirmation
  /// When false, a detection is screened only against active tracklets of its
  /// own modality. When true, active tracklets of both modalities count, so
  /// an object already tracked by the other sensor blocks track birth.
  bool screen_against_both{false};
};

/// Pseudo-observation for an unmatched tracklet taken from its paired,
/// matched partner in the other modality.
struct RecoveryAction
{
  TrackId target{0};
  Box3D pseudo_box;
  PairId pair{0};
};

enum class CheckView { perspective, bev };

struct ConfirmAction
{
  std::size_t detection{0};          // index into the checked detections
  std::size_t matched_detection{0};  // index into the opposite-modality detections
  CheckView view{CheckView::perspective};
  double cost{0.0};
};

/// discarded, confirmed and candidates partition the checked detections.
struct CheckResult
{
  std::vector<std::size_t> discarded;
  std::vector<ConfirmAction> confirmed;
  std::vector<std::size_t> candidates;
};

/// For every unmatched tracklet of `modality` whose pair partner was matched
/// this frame (present in `opposite_matched`), emit a recovery carrying the
/// partner's detected box.
std::vector<RecoveryAction> recover_unmatched_tracklets(
  Modality modality, std::span<const TrackId> unmatched, std::span<const TrackletPair> pairs,
  const std::map<PairId, Box3D> & opposite_matched);

/// Perspective-view check of unmatched radar detections against established
/// tracklets (occlusion discard) and unmatched camera detections (image IoU).
CheckResult check_unmatched_radar(
  std::span<const Detection3D> unmatched_radar, std::span<const Box3D> established,
  std::span<const Detection3D> camera_dets, const CameraModel & cam,
  const CrossCheckConfig & config);

/// BEV check of unmatched camera detections against established tracklets
/// (footprint IoU discard) and unmatched radar detections (DIoU).
CheckResult check_unmatched_camera(
  std::span<const Detection3D> unmatched_camera, std::span<const Box3D> established,
  std::span<const Detection3D> radar_dets, const CrossCheckConfig & config);

}  // namespace trackfuse

#endif  // TRACKFUSE__CROSSCHECK_HPP_
