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

#ifndef TRACKFUSE__METRICS_HPP_
#define TRACKFUSE__METRICS_HPP_

#include "trackfuse/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trackfuse
{

/// An identified box at one frame; used for both ground truth and tracks.
struct LabeledBox
{
  std::int64_t id{0};
  Box3D box;
};

struct LabeledFrame
{
  int frame{0};
  std::vector<LabeledBox> boxes;
};

using GtObject = LabeledBox;

inline constexpr double kDefaultMatchDistance = 2.0;

/// CLEAR-MOT and identity metrics. Ratios are absent when undefined.
struct MotReport
{
  std::optional<double> mota;
  std::optional<double> idf1;
  std::optional<double> recall;
  std::optional<double> precision;
  std::int64_t tp{0};
  std::int64_t fp{0};
  std::int64_t fn{0};
  std::int64_t ids{0};
  std::int64_t idtp{0};
  std::int64_t idfp{0};
  std::int64_t idfn{0};
  std::int64_t gt_count{0};
  std::int64_t pred_count{0};
  std::optional<std::string> slice;

  /// Fills the ratios from the counts.
  void finalize();
};

bool operator==(const MotReport & a, const MotReport & b);

struct FrameMatch
{
  std::vector<std::pair<std::int64_t, std::int64_t>> tp;  // (gt id, pred id)
  std::vector<std::int64_t> fp;                           // pred ids
  std::vector<std::int64_t> fn;                           // gt ids
};

/// One frame of CLEAR matching on BEV center distance gated at `max_distance`.
/// Correspondences in `previous` (gt id -> pred id) that are still within the
/// gate are kept before solving the rest by minimum-cost assignment.
FrameMatch match_frame(
  std::span<const LabeledBox> gt, std::span<const LabeledBox> pred, double max_distance,
  const std::map<std::int64_t, std::int64_t> & previous = {});

MotReport evaluate(
  std::span<const LabeledFrame> gt, std::span<const LabeledFrame> pred,
  double max_distance = kDefaultMatchDistance);

enum class SliceAxis { distance, azimuth, occlusion };

std::vector<double> default_bin_edges(SliceAxis axis);

/// Per-bin reports. Ground-truth objects are binned by range, |azimuth| in
/// degrees or per-frame image occlusion rate; unmatched predictions go to the
/// bin of the nearest ground truth within twice the gate, else their own.
/// `edges` are ascending lower bounds; the last bin is open-ended except for
/// occlusion, whose last edge (1.0) closes it. The occlusion axis throws
/// SchemaError without a camera model.
std::vector<MotReport> slice_metrics(
  std::span<const LabeledFrame> gt, std::span<const LabeledFrame> pred, SliceAxis axis,
  std::span<const double> edges, const CameraModel * camera,
  double max_distance = kDefaultMatchDistance);

/// Max over other objects of overlap_fraction(self, other) in the image. With
/// `nearer_only`, only objects closer to the camera count as occluders.
std::vector<double> occlusion_rates(
  std::span<const Box3D> boxes, const CameraModel & camera, bool nearer_only = false);

/// Exhaustive reference for `evaluate` on tiny instances (<= 6 ids on each
/// side, <= 20 frames). Throws std::invalid_argument on larger input.
MotReport brute_force_oracle(
  std::span<const LabeledFrame> gt, std::span<const LabeledFrame> pred,
  double max_distance = kDefaultMatchDistance);

}  // namespace trackfuse

#endif  // TRACKFUSE__METRICS_HPP_
