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

#include "trackfuse/tracker.hpp"

#include "trackfuse/assignment.hpp"
#include "trackfuse/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

namespace trackfuse
{

std::string_view to_string(Modality m) { return m == Modality::camera ? "camera" : "radar"; }

std::string_view to_string(TrackStatus s)
{
  switch (s) {
    case TrackStatus::tentative:
      return "tentative";
    case TrackStatus::active:
      return "active";
    case TrackStatus::lost:
      return "lost";
    case TrackStatus::removed:
      return "removed";
  }
  return "removed";
}

std::string_view to_string(ObservationSource s)
{
  switch (s) {
    case ObservationSource::detected:
      return "detected";
    case ObservationSource::recovered:
      return "recovered";
    case ObservationSource::predicted:
      return "predicted";
  }
  return "predicted";
}

namespace
{

constexpr double kMinExtent = 1e-3;

}  // namespace

Box3D MotionState::box() const
{
  const double s = mean(6);
  const double c = mean(7);
  const bool degenerate = std::hypot(s, c) < 1e-9;
  return Box3D(
    mean(0), mean(1), mean(2), std::max(mean(3), kMinExtent), std::max(mean(4), kMinExtent),
    std::max(mean(5), kMinExtent), degenerate ? 0.0 : s, degenerate ? 1.0 : c);
}

MeasVector to_measurement(const Box3D & box)
{
  MeasVector z;
  z << box.x, box.y, box.z, box.l, box.w, box.h, box.sin_yaw, box.cos_yaw;
  return z;
}

void kalman_predict(MotionState & state, const StateMatrix & process_noise, int dt)
{
  StateMatrix f = StateMatrix::Identity();
  f(0, 8) = dt;
  f(1, 9) = dt;
  f(2, 10) = dt;
  state.mean = f * state.mean;
  state.covariance = f * state.covariance * f.transpose() + process_noise * dt;
  state.covariance = 0.5 * (state.covariance + state.covariance.transpose());
}

void kalman_update(MotionState & state, const MeasVector & z, const MeasMatrix & noise)
{
  using HMatrix = Eigen::Matrix<double, kMeasDim, kStateDim>;
  HMatrix h = HMatrix::Zero();
  h.leftCols<kMeasDim>().setIdentity();

  const MeasVector innovation = z - h * state.mean;
  const MeasMatrix s = h * state.covariance * h.transpose() + noise;
  const Eigen::Matrix<double, kStateDim, kMeasDim> k =
    s.ldlt().solve(h * state.covariance.transpose()).transpose();

  state.mean += k * innovation;
  const StateMatrix ikh = StateMatrix::Identity() - k * h;
  state.covariance = ikh * state.covariance * ikh.transpose() + k * noise * k.transpose();
  state.covariance = 0.5 * (state.covariance + state.covariance.transpose());

  const double norm = std::hypot(state.mean(6), state.mean(7));
  if (norm > 1e-6) {
    state.mean(6) /= norm;
    state.mean(7) /= norm;
  } else {
    state.mean(6) = z(6);
    state.mean(7) = z(7);
  }
}

StateMatrix TrackerConfig::process_noise() const
{
  StateMatrix q = StateMatrix::Zero();
  for (int i = 0; i < 3; ++i) {
    q(i, i) = process_pos_std * process_pos_std;
    q(3 + i, 3 + i) = process_size_std * process_size_std;
    q(8 + i, 8 + i) = process_vel_std * process_vel_std;
  }
  q(6, 6) = q(7, 7) = process_heading_std * process_heading_std;
  return q;
}

MeasMatrix TrackerConfig::measurement_noise() const
{
  MeasMatrix r = MeasMatrix::Zero();
  r(0, 0) = r(1, 1) = meas_pos_std * meas_pos_std;
  r(2, 2) = meas_z_std * meas_z_std;
  r(3, 3) = r(4, 4) = r(5, 5) = meas_size_std * meas_size_std;
  r(6, 6) = r(7, 7) = meas_heading_std * meas_heading_std;
  return r;
}

Tracker::Tracker(TrackerConfig config, Modality modality)
: config_(std::move(config)),
  modality_(modality),
  process_noise_(config_.process_noise()),
  meas_noise_(config_.measurement_noise())
{
}

void Tracker::predict(int frame)
{
  if (frame_ && frame <= *frame_) {
    throw FrameRegressionError(*frame_, frame);
  }
  const int dt = frame_ ? frame - *frame_ : 1;
  frame_ = frame;
  for (auto & t : tracklets_) {
    kalman_predict(t.motion, process_noise_, dt);
    t.box = t.motion.box();
    t.age += dt;
    t.time_since_update += dt;
  }
}

double Tracker::match_cost(const Tracklet & t, const Detection3D & d, bool use_appearance) const
{
  const double geometric = diou(bev_footprint(t.box), bev_footprint(d.box));
  if (!use_appearance || t.appearance.empty() || !d.has_appearance() ||
      t.appearance.size() != d.appearance.size())
  {
    return geometric;
  }
  double cosine = 0.0;
  for (std::size_t i = 0; i < t.appearance.size(); ++i) {
    cosine += t.appearance[i] * d.appearance[i];
  }
  const double lambda = config_.appearance_weight;
  return lambda * geometric + (1.0 - lambda) * (1.0 - cosine);
}

StepResult Tracker::associate(std::span<const Detection3D> detections)
{
  StepResult result;

  std::vector<std::size_t> high, low;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].score >= config_.tau_high) {
      high.push_back(i);
    } else if (detections[i].score >= config_.tau_low) {
      low.push_back(i);
    }
  }

  std::vector<char> det_matched(detections.size(), 0);
  std::vector<char> track_matched(tracklets_.size(), 0);

  auto apply_match = [&](std::size_t ti, std::size_t di) {
    Tracklet & t = tracklets_[ti];
    const Detection3D & d = detections[di];
    kalman_update(t.motion, to_measurement(d.box), meas_noise_);
    t.box = t.motion.box();
    t.time_since_update = 0;
    t.hits += 1;
    t.score = d.score;
    if (d.has_appearance()) {
      update_appearance(t, d.appearance);
    }
    if (t.status == TrackStatus::tentative && t.hits >= config_.hit_streak) {
      t.status = TrackStatus::active;
    } else if (t.status == TrackStatus::lost) {
      t.status = TrackStatus::active;
    }
    push_history(t, d.box, ObservationSource::detected);
    det_matched[di] = 1;
    track_matched[ti] = 1;
    result.matched.emplace_back(t.id, di);
  };

  // Stage 1: confident detections against every alive tracklet.
  {
    std::vector<std::size_t> rows(tracklets_.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i] = i;
    }
    CostMatrix cost(rows.size(), high.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < high.size(); ++c) {
        cost(r, c) = match_cost(tracklets_[rows[r]], detections[high[c]], true);
      }
    }
    const auto assignment = solve_assignment(cost, config_.match_gate);
    for (const auto & [r, c] : assignment.matches) {
      apply_match(rows[r], high[c]);
    }
  }

  // Stage 2: leftover detections above the low threshold against leftover
  // confirmed tracklets, geometry only.
  {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < tracklets_.size(); ++i) {
      if (!track_matched[i] && tracklets_[i].confirmed()) {
        rows.push_back(i);
      }
    }
    std::vector<std::size_t> cols;
    for (std::size_t di : high) {
      if (!det_matched[di]) {
        cols.push_back(di);
      }
    }
    cols.insert(cols.end(), low.begin(), low.end());
    std::sort(cols.begin(), cols.end());
    CostMatrix cost(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        cost(r, c) = match_cost(tracklets_[rows[r]], detections[cols[c]], false);
      }
    }
    const auto assignment = solve_assignment(cost, config_.match_gate);
    for (const auto & [r, c] : assignment.matches) {
      apply_match(rows[r], cols[c]);
    }
  }

  std::sort(result.matched.begin(), result.matched.end());
  for (std::size_t i = 0; i < tracklets_.size(); ++i) {
    if (!track_matched[i]) {
      auto & t = tracklets_[i];
      if (t.status == TrackStatus::active) {
        t.status = TrackStatus::lost;
      }
      result.unmatched_tracklets.push_back(t.id);
    }
  }
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (!det_matched[i]) {
      result.unmatched_detections.push_back(i);
    }
  }
  return result;
}

TrackId Tracker::spawn(const Detection3D & detection, bool confirmed)
{
  Tracklet t;
  t.id = next_id_++;
  t.modality = modality_;
  t.status = confirmed ? TrackStatus::active : TrackStatus::tentative;
  t.motion.mean.setZero();
  t.motion.mean.head<kMeasDim>() = to_measurement(detection.box);
  t.motion.covariance = StateMatrix::Zero();
  t.motion.covariance.topLeftCorner<kMeasDim, kMeasDim>() = meas_noise_;
  for (int i = 8; i < kStateDim; ++i) {
    t.motion.covariance(i, i) = config_.init_vel_std * config_.init_vel_std;
  }
  t.box = detection.box;
  t.hits = 1;
  t.score = detection.score;
  if (detection.has_appearance()) {
    t.appearance = detection.appearance;
  }
  if (!frame_) {
    frame_ = detection.frame;
  }
  push_history(t, detection.box, ObservationSource::detected);
  tracklets_.push_back(std::move(t));
  return tracklets_.back().id;
}

Tracklet * Tracker::find_alive(TrackId id)
{
  auto it = std::lower_bound(
    tracklets_.begin(), tracklets_.end(), id,
    [](const Tracklet & t, TrackId key) { return t.id < key; });
  if (it == tracklets_.end() || it->id != id) {
    return nullptr;
  }
  return &*it;
}

const Tracklet * Tracker::find(TrackId id) const
{
  return const_cast<Tracker *>(this)->find_alive(id);
}

void Tracker::apply_recovery(TrackId id, const Box3D & pseudo_box, bool update_motion)
{
  Tracklet * t = find_alive(id);
  if (t == nullptr) {
    throw StaleTrackletError(id);
  }
  if (update_motion) {
    kalman_update(t->motion, to_measurement(pseudo_box), meas_noise_ * config_.recover_noise_scale);
    t->box = t->motion.box();
  } else {
    t->box = pseudo_box;
  }
  t->time_since_update = 0;
  if (t->status == TrackStatus::lost) {
    t->status = TrackStatus::active;
  }
  push_history(*t, pseudo_box, ObservationSource::recovered);
}

void Tracker::prune()
{
  std::erase_if(tracklets_, [this](const Tracklet & t) {
    if (t.status == TrackStatus::tentative && t.time_since_update > 0) {
      return true;
    }
    return t.time_since_update > config_.max_lost_frames;
  });
}

std::vector<const Tracklet *> Tracker::reportable() const
{
  std::vector<const Tracklet *> out;
  for (const auto & t : tracklets_) {
    if (t.status == TrackStatus::active && t.updated_this_frame()) {
      out.push_back(&t);
    }
  }
  return out;
}

void Tracker::push_history(Tracklet & t, const Box3D & box, ObservationSource source)
{
  const int frame = frame_.value_or(0);
  if (!t.history.empty() && t.history.back().frame >= frame) {
    t.history.back() = HistoryEntry{frame, box, source};
    return;
  }
  t.history.push_back(HistoryEntry{frame, box, source});
  while (t.history.size() > config_.history_len) {
    t.history.pop_front();
  }
}

void Tracker::update_appearance(Tracklet & t, const std::vector<double> & embedding)
{
  if (t.appearance.size() != embedding.size()) {
    t.appearance = embedding;
    return;
  }
  const double m = config_.appearance_momentum;
  double norm = 0.0;
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    t.appearance[i] = m * t.appearance[i] + (1.0 - m) * embedding[i];
    norm += t.appearance[i] * t.appearance[i];
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto & v : t.appearance) {
      v /= norm;
    }
  }
}

}  // namespace trackfuse
