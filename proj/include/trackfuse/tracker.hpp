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

#ifndef TRACKFUSE__TRACKER_HPP_
#define TRACKFUSE__TRACKER_HPP_

#include "trackfuse/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace trackfuse
{

using TrackId = std::int64_t;

enum class Modality { camera, radar };

std::string_view to_string(Modality m);

struct Detection3D
{
  Box3D box;
  double score{1.0};
  Modality modality{Modality::camera};
  int frame{0};
  /// Unit-norm appearance embedding; empty when the detector provides none.
  std::vector<double> appearance;

  bool has_appearance() const { return !appearance.empty(); }
};

/// Detections of one modality at one frame.
struct FrameDetections
{
  int frame{0};
  std::vector<Detection3D> boxes;
};

inline constexpr int kStateDim = 11;
inline constexpr int kMeasDim = 8;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using MeasVector = Eigen::Matrix<double, kMeasDim, 1>;
using MeasMatrix = Eigen::Matrix<double, kMeasDim, kMeasDim>;

/// Constant-velocity Kalman state over [x y z l w h sin cos vx vy vz].
struct MotionState
{
  StateVector mean{StateVector::Zero()};
  StateMatrix covariance{StateMatrix::Identity()};

  Box3D box() const;
};

MeasVector to_measurement(const Box3D & box);

/// Time update over `dt` frames: positions advance by velocity * dt and the
/// covariance grows by `process_noise * dt`.
void kalman_predict(MotionState & state, const StateMatrix & process_noise, int dt);

/// Measurement update with the 8-dim box vector (Joseph form). Heading is
/// renormalized afterwards.
void kalman_update(MotionState & state, const MeasVector & z, const MeasMatrix & noise);

enum class TrackStatus { tentative, active, lost, removed };
enum class ObservationSource { detected, recovered, predicted };

std::string_view to_string(TrackStatus s);
std::string_view to_string(ObservationSource s);

struct HistoryEntry
{
  int frame{0};
  Box3D box;
  ObservationSource source{ObservationSource::detected};
};

struct Tracklet
{
  TrackId id{0};
  Modality modality{Modality::camera};
  TrackStatus status{TrackStatus::tentative};
  MotionState motion;
  /// Most recent observations, oldest first; frames strictly increasing.
  std::deque<HistoryEntry> history;
  int age{0};
  int time_since_update{0};
  int hits{0};
  double score{0.0};
  /// Box reported for the current frame (posterior, recovered or predicted).
  Box3D box;
  std::vector<double> appearance;

  bool updated_this_frame() const { return time_since_update == 0; }
  bool confirmed() const { return status == TrackStatus::active || status == TrackStatus::lost; }
};

struct TrackerConfig
{
  std::size_t history_len{5};
  double tau_high{0.6};
  double tau_low{0.1};
  double match_gate{0.9};
  double appearance_weight{0.7};  // lambda on the geometric term
  int max_lost_frames{10};
  int hit_streak{2};
  double recover_noise_scale{4.0};
  double appearance_momentum{0.9};

  // Standard deviations, per frame where applicable.
  double process_pos_std{0.1};
  double process_vel_std{0.02};
  double process_size_std{0.02};
  double process_heading_std{0.02};
  double meas_pos_std{0.5};
  double meas_z_std{0.3};
  double meas_size_std{0.3};
  double meas_heading_std{0.1};
  double init_vel_std{1.0};

  StateMatrix process_noise() const;
  MeasMatrix measurement_noise() const;
};

struct StepResult
{
  std::vector<std::pair<TrackId, std::size_t>> matched;
  std::vector<TrackId> unmatched_tracklets;
  std::vector<std::size_t> unmatched_detections;
  std::vector<TrackId> spawned;
};

/// Single-modality online tracker: constant-velocity Kalman filter with
/// two-stage score-split association. Track birth is left to the caller.
class Tracker
{
public:
  explicit Tracker(TrackerConfig config, Modality modality);

  /// Advances every alive tracklet to `frame`. Throws FrameRegressionError
  /// unless `frame` is after the last processed frame.
  void predict(int frame);

  StepResult associate(std::span<const Detection3D> detections);

  TrackId spawn(const Detection3D & detection, bool confirmed);

  /// Throws StaleTrackletError if `id` is not alive.
  void apply_recovery(TrackId id, const Box3D & pseudo_box, bool update_motion);

  void prune();

  /// Confirmed tracklets observed or recovered at the current frame.
  std::vector<const Tracklet *> reportable() const;

  const std::vector<Tracklet> & tracklets() const { return tracklets_; }
  const Tracklet * find(TrackId id) const;
  const TrackerConfig & config() const { return config_; }
  Modality modality() const { return modality_; }
  std::optional<int> frame() const { return frame_; }

private:
  Tracklet * find_alive(TrackId id);
  void push_history(Tracklet & t, const Box3D & box, ObservationSource source);
  void update_appearance(Tracklet & t, const std::vector<double> & embedding);
  double match_cost(const Tracklet & t, const Detection3D & d, bool use_appearance) const;

  TrackerConfig config_;
  Modality modality_;
  StateMatrix process_noise_;
  MeasMatrix meas_noise_;
  std::vector<Tracklet> tracklets_;  // sorted by id
  TrackId next_id_{1};
  std::optional<int> frame_;
};

}  // namespace trackfuse

#endif  // TRACKFUSE__TRACKER_HPP_
