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

#include "trackfuse/crosscheck.hpp"

#include "trackfuse/assignment.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace trackfuse
{

std::vector<RecoveryAction> recover_unmatched_tracklets(
  Modality modality, std::span<const TrackId> unmatched, std::span<const TrackletPair> pairs,
  const std::map<PairId, Box3D> & opposite_matched)
{
  std::vector<RecoveryAction> actions;
  for (const TrackId id : unmatched) {
    for (const auto & pair : pairs) {
      const TrackId member = modality == Modality::camera ? pair.camera_id : pair.radar_id;
      if (member != id) {
        continue;
      }
      if (auto it = opposite_matched.find(pair.id); it != opposite_matched.end()) {
        actions.push_back(RecoveryAction{id, it->second, pair.id});
      }
      break;
    }
  }
  return actions;
}

namespace
{

// Splits survivors into confirmed/candidates given a survivor x opposite cost matrix.
void resolve_matches(
  const std::vector<std::size_t> & survivors, const CostMatrix & cost, double gate,
  CheckView view, CheckResult & result)
{
  const auto assignment = solve_assignment(cost, gate);
  for (const auto & [r, c] : assignment.matches) {
    result.confirmed.push_back(ConfirmAction{survivors[r], c, view, cost(r, c)});
  }
  for (const std::size_t r : assignment.unmatched_rows) {
    result.candidates.push_back(survivors[r]);
  }
  std::sort(result.candidates.begin(), result.candidates.end());
  std::sort(
    result.confirmed.begin(), result.confirmed.end(),
    [](const ConfirmAction & a, const ConfirmAction & b) { return a.detection < b.detection; });
}

}  // namespace

CheckResult check_unmatched_radar(
  std::span<const Detection3D> unmatched_radar, std::span<const Box3D> established,
  std::span<const Detection3D> camera_dets, const CameraModel & cam,
  const CrossCheckConfig & config)
{
  CheckResult result;

  std::vector<ImageRect> established_rects;
  for (const auto & box : established) {
    if (auto rect = project_box(box, cam)) {
      established_rects.push_back(*rect);
    }
  }
  std::vector<std::optional<ImageRect>> camera_rects;
  camera_rects.reserve(camera_dets.size());
  for (const auto & d : camera_dets) {
    camera_rects.push_back(project_box(d.box, cam));
  }

  std::vector<std::size_t> survivors;
  std::vector<ImageRect> survivor_rects;
  std::vector<std::size_t> unprojectable;
  for (std::size_t i = 0; i < unmatched_radar.size(); ++i) {
    const auto rect = project_box(unmatched_radar[i].box, cam);
    if (!rect) {
      unprojectable.push_back(i);
      continue;
    }
    const bool occluded = std::any_of(
      established_rects.begin(), established_rects.end(), [&](const ImageRect & other) {
        return overlap_fraction(*rect, other) > config.occlusion_threshold;
      });
    if (occluded) {
      result.discarded.push_back(i);
    } else {
      survivors.push_back(i);
      survivor_rects.push_back(*rect);
    }
  }

  CostMatrix cost(survivors.size(), camera_dets.size());
  for (std::size_t r = 0; r < survivors.size(); ++r) {
    for (std::size_t c = 0; c < camera_dets.size(); ++c) {
      cost(r, c) = camera_rects[c] ? 1.0 - rect_iou(survivor_rects[r], *camera_rects[c])
                                   : std::numeric_limits<double>::infinity();
    }
  }
  resolve_matches(survivors, cost, 1.0 - config.image_iou_gate, CheckView::perspective, result);
  result.candidates.insert(result.candidates.end(), unprojectable.begin(), unprojectable.end());
  std::sort(result.candidates.begin(), result.candidates.end());
  return result;
}

CheckResult check_unmatched_camera(
  std::span<const Detection3D> unmatched_camera, std::span<const Box3D> established,
  std::span<const Detection3D> radar_dets, const CrossCheckConfig & config)
{
  CheckResult result;

  std::vector<BevRect> established_rects;
  established_rects.reserve(established.size());
  for (const auto & box : established) {
    established_rects.push_back(bev_footprint(box));
  }

  std::vector<std::size_t> survivors;
  std::vector<BevRect> survivor_rects;
  for (std::size_t i = 0; i < unmatched_camera.size(); ++i) {
    const BevRect rect = bev_footprint(unmatched_camera[i].box);
    const bool occluded = std::any_of(
      established_rects.begin(), established_rects.end(), [&](const BevRect & other) {
        return bev_iou(rect, other) > config.bev_occlusion_threshold;
      });
    if (occluded) {
      result.discarded.push_back(i);
    } else {
      survivors.push_back(i);
      survivor_rects.push_back(rect);
    }
  }

  std::vector<BevRect> radar_rects;
  radar_rects.reserve(radar_dets.size());
  for (const auto & d : radar_dets) {
    radar_rects.push_back(bev_footprint(d.box));
  }
  CostMatrix cost(survivors.size(), radar_dets.size());
  for (std::size_t r = 0; r < survivors.size(); ++r) {
    for (std::size_t c = 0; c < radar_dets.size(); ++c) {
      cost(r, c) = diou(survivor_rects[r], radar_rects[c]);
    }
  }
  resolve_matches(survivors, cost, config.diou_gate, CheckView::bev, result);
  return result;
}

}  // namespace trackfuse
