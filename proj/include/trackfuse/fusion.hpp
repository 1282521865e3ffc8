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

#ifndef TRACKFUSE__FUSION_HPP_
#define TRACKFUSE__FUSION_HPP_

#include "trackfuse/geometry.hpp"
#include "trackfuse/tracker.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace trackfuse
{

using PairId = std::int64_t;

enum class PairingMetric { iou, aop, cd };
enum class FusionWeighting { uniform, weighted_sum, softmax };

std::string_view to_string(PairingMetric m);
std::string_view to_string(FusionWeighting w);

struct FusionConfig
{
  std::size_t history_len{5};
  PairingMetric metric{PairingMetric::cd};
  double gate_iou{0.7};
  double gate_aop{5.0};
  double gate_cd{3.0};
  /// Consecutive failing frames after which a sticky pair dissolves.
  int dissolve_after{3};
  double dedup_threshold{0.5};
  FusionWeighting weighting{FusionWeighting::softmax};
  /// Use the unnormalized reciprocal-softmax weights (they sum to at least 4).
  bool inverse_softmax_weights{false};
  /// Conventional sample standard deviation instead of sqrt(sum)/(n-1).
  bool std_sample{false};
  /// Integrate weighted member displacements from the previous fused center.
  bool fuse_displacements{false};

  double gate() const;
};

/// Cross-modality association with a stable fused identity.
struct TrackletPair
{
  PairId id{0};
  TrackId camera_id{0};
  TrackId radar_id{0};
  double cost{0.0};
  int frames_paired{0};
  int failing_frames{0};

  // Anchor for displacement-integrating fusion: previous fused center and the
  // member centers it was computed from.
  std::optional<std::array<double, 3>> last_fused_center;
  std::array<double, 3> last_camera_center{};
  std::array<double, 3> last_radar_center{};
};

double pair_cost_avg_iou(const Tracklet & a, const Tracklet & b, std::size_t n);
double pair_cost_avg_aop(const Tracklet & a, const Tracklet & b, std::size_t n);
double pair_cost_avg_cd(const Tracklet & a, const Tracklet & b, std::size_t n);
double pair_cost(const Tracklet & a, const Tracklet & b, PairingMetric metric, std::size_t n);

/// One-shot gated minimum-cost pairing. New pairs take ids from `next_id`.
std::vector<TrackletPair> pair_tracklets(
  std::span<const Tracklet * const> camera, std::span<const Tracklet * const> radar,
  PairingMetric metric, double gate, std::size_t n, PairId & next_id);

/// Sticky pair bookkeeping across frames.
class PairRegistry
{
public:
  /// Keeps live pairs whose members are still present (counting failing
  /// frames), then pairs the leftover tracklets.
  void update(
    std::span<const Tracklet * const> camera, std::span<const Tracklet * const> radar,
    const FusionConfig & config);

  const std::vector<TrackletPair> & pairs() const { return pairs_; }
  std::vector<TrackletPair> & pairs() { return pairs_; }
  void clear() { pairs_.clear(); }

private:
  std::vector<TrackletPair> pairs_;
  PairId next_id_{1};
};

struct DisplacementWindow
{
  std::vector<double> displacements;  // meters per frame, oldest first
  double mean{0.0};
  double sigma{0.0};
};

/// Uncertainty score of a displacement set: sqrt(sum (d - mean)^2) / (n - 1),
/// or the sample standard deviation when `std_sample` is set. Fewer than two
/// displacements give +inf.
double displacement_sigma(std::span<const double> displacements, bool std_sample);

DisplacementWindow displacement_std(const Tracklet & t, std::size_t n, bool std_sample = false);

std::pair<double, double> fusion_weights(
  double sigma1, double sigma2, FusionWeighting weighting = FusionWeighting::softmax,
  bool inverse_softmax_weights = false);

struct FusedTrack
{
  PairId pair{0};
  Box3D box;
  double w_camera{0.5};
  double w_radar{0.5};
  bool camera_updated{false};
  bool radar_updated{false};
  double score{0.0};
  std::array<double, 3> camera_center{};
  std::array<double, 3> radar_center{};
};

FusedTrack fuse_pair(
  const TrackletPair & pair, const Tracklet & camera, const Tracklet & radar,
  const FusionConfig & config);

enum class TrackSource { fused, camera, radar };

std::string_view to_string(TrackSource s);

/// One reported track in any of the three output streams.
struct OutputTrack
{
  TrackId id{0};
  Box3D box;
  double score{0.0};
  TrackSource source{TrackSource::fused};
  TrackStatus status{TrackStatus::active};
  std::optional<std::pair<TrackId, TrackId>> pair;  // (camera id, radar id)
};

// Passthrough ids are namespaced so they never collide with pair ids.
inline constexpr TrackId kCameraPassthroughBase = 1'000'000'000;
inline constexpr TrackId kRadarPassthroughBase = 2'000'000'000;

OutputTrack passthrough_track(const Tracklet & t);

/// Fused tracks for pairs with at least one member observed this frame, plus
/// unpaired reportable tracklets of both modalities, deduplicated by greedy
/// BEV-IoU suppression (fused first, then by descending score).
std::vector<OutputTrack> fuse_all(
  std::span<const TrackletPair> pairs, std::span<const Tracklet * const> camera,
  std::span<const Tracklet * const> radar, const FusionConfig & config,
  std::vector<FusedTrack> * fused_out = nullptr);

}  // namespace trackfuse

#endif  // TRACKFUSE__FUSION_HPP_
