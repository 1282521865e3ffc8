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

#include "trackfuse/pipeline.hpp"

#include "trackfuse/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace trackfuse
{

BoosterConfig BoosterConfig::defaults()
{
  BoosterConfig config;
  config.camera_tracker.meas_pos_std = 0.8;
  config.radar_tracker.meas_pos_std = 0.3;
  config.radar_tracker.meas_size_std = 0.5;
  config.radar_tracker.meas_heading_std = 0.2;
  return config;
}

std::string_view to_string(SpawnPolicy p)
{
  return p == SpawnPolicy::strict ? "strict" : "lenient";
}

void BoosterConfig::validate() const
{
  auto fail = [](const std::string & field, const std::string & why) {
    throw SchemaError("invalid config field '" + field + "': " + why);
  };
  for (const auto * t : {&camera_tracker, &radar_tracker}) {
    const std::string prefix = t == &camera_tracker ? "camera." : "radar.";
    if (t->history_len < 2) {
      fail(prefix + "history_len", "must be at least 2");
    }
    if (!(t->match_gate > 0.0)) {
      fail(prefix + "match_gate", "must be positive");
    }
    if (!(t->tau_low >= 0.0 && t->tau_low <= t->tau_high && t->tau_high <= 1.0)) {
      fail(prefix + "tau_high", "thresholds must satisfy 0 <= tau_low <= tau_high <= 1");
    }
    if (!(t->appearance_weight >= 0.0 && t->appearance_weight <= 1.0)) {
      fail(prefix + "appearance_weight", "must lie in [0, 1]");
    }
    if (t->max_lost_frames < 0) {
      fail(prefix + "max_lost_frames", "must be non-negative");
    }
    if (t->hit_streak < 1) {
      fail(prefix + "hit_streak", "must be at least 1");
    }
    if (!(t->recover_noise_scale > 0.0)) {
      fail(prefix + "recover_noise_scale", "must be positive");
    }
  }
  if (!(crosscheck.image_iou_gate > 0.0 && crosscheck.image_iou_gate <= 1.0)) {
    fail("crosscheck.image_iou_gate", "must lie in (0, 1]");
  }
  if (!(crosscheck.diou_gate > 0.0)) {
    fail("crosscheck.diou_gate", "must be positive");
  }
  if (!(crosscheck.occlusion_threshold > 0.0)) {
    fail("crosscheck.occlusion_threshold", "must be positive");
  }
  if (!(crosscheck.bev_occlusion_threshold > 0.0)) {
    fail("crosscheck.bev_occlusion_threshold", "must be positive");
  }
  if (fusion.history_len < 2) {
    fail("fusion.history_len", "must be at least 2");
  }
  if (!(fusion.gate_iou > 0.0)) {
    fail("fusion.gate_iou", "must be positive");
  }
  if (!(fusion.gate_aop > 0.0)) {
    fail("fusion.gate_aop", "must be positive");
  }
  if (!(fusion.gate_cd > 0.0)) {
    fail("fusion.gate_cd", "must be positive");
  }
  if (fusion.dissolve_after < 1) {
    fail("fusion.dissolve_after", "must be at least 1");
  }
  if (!(fusion.dedup_threshold > 0.0)) {
    fail("fusion.dedup_threshold", "must be positive");
  }
}

OutputTrack refined_track(const Tracklet & t)
{
  OutputTrack out;
  out.id = t.id;
  out.box = t.box;
  out.score = t.score;
  out.source = t.modality == Modality::camera ? TrackSource::camera : TrackSource::radar;
  out.status = t.status;
  return out;
}

namespace
{

std::vector<const Tracklet *> confirmed_of(const Tracker & tracker)
{
  std::vector<const Tracklet *> out;
  for (const auto & t : tracker.tracklets()) {
    if (t.confirmed()) {
      out.push_back(&t);
    }
  }
  return out;
}

std::vector<OutputTrack> refined_of(const Tracker & tracker)
{
  std::vector<OutputTrack> out;
  for (const auto * t : tracker.reportable()) {
    out.push_back(refined_track(*t));
  }
  return out;
}

// Box of each matched tracklet's detection, keyed by the pair that holds it.
std::map<PairId, Box3D> matched_by_pair(
  const StepResult & step, std::span<const Detection3D> dets,
  std::span<const TrackletPair> pairs, Modality modality)
{
  std::map<TrackId, std::size_t> det_of;
  for (const auto & [id, di] : step.matched) {
    det_of.emplace(id, di);
  }
  std::map<PairId, Box3D> out;
  for (const auto & pair : pairs) {
    const TrackId member = modality == Modality::camera ? pair.camera_id : pair.radar_id;
    if (auto it = det_of.find(member); it != det_of.end()) {
      out.emplace(pair.id, dets[it->second].box);
    }
  }
  return out;
}

}  // namespace

BoosterPipeline::BoosterPipeline(BoosterConfig config, std::optional<CameraModel> camera)
: config_(std::move(config)),
  camera_model_(std::move(camera)),
  camera_(config_.camera_tracker, Modality::camera),
  radar_(config_.radar_tracker, Modality::radar)
{
  config_.validate();
  if (camera_model_) {
    camera_model_->validate();
  }
}

FrameOutput BoosterPipeline::process_frame(
  int frame, std::span<const Detection3D> camera_dets, std::span<const Detection3D> radar_dets)
{
  if (last_frame_ && frame <= *last_frame_) {
    throw FrameRegressionError(*last_frame_, frame);
  }
  for (const auto * dets : {&camera_dets, &radar_dets}) {
    for (const auto & d : *dets) {
      if (d.frame != frame) {
        throw SchemaError(
          "detection/frame mismatch: detection tagged frame " + std::to_string(d.frame) +
          " processed at frame " + std::to_string(frame));
      }
    }
  }
  if (config_.enable_crosscheck_detections && !camera_model_) {
    throw SchemaError("camera calibration is required when the detection cross-check is enabled");
  }
  last_frame_ = frame;

  // Inner-modality matching.
  camera_.predict(frame);
  radar_.predict(frame);
  const StepResult cam_step = camera_.associate(camera_dets);
  const StepResult rad_step = radar_.associate(radar_dets);

  // Recovery of unmatched tracklets from last frame's pairs.
  std::vector<RecoveryAction> cam_recoveries, rad_recoveries;
  if (config_.enable_crosscheck_tracklets) {
    const auto & pairs = pairs_.pairs();
    cam_recoveries = recover_unmatched_tracklets(
      Modality::camera, cam_step.unmatched_tracklets, pairs,
      matched_by_pair(rad_step, radar_dets, pairs, Modality::radar));
    rad_recoveries = recover_unmatched_tracklets(
      Modality::radar, rad_step.unmatched_tracklets, pairs,
      matched_by_pair(cam_step, camera_dets, pairs, Modality::camera));
  }

  // Unmatched detections worth checking; anything under tau_low is dropped.
  auto leftovers = [](const StepResult & step, std::span<const Detection3D> dets, double tau_low) {
    std::vector<Detection3D> out;
    for (const std::size_t i : step.unmatched_detections) {
      if (dets[i].score >= tau_low) {
        out.push_back(dets[i]);
      }
    }
    return out;
  };
  const auto cam_left = leftovers(cam_step, camera_dets, config_.camera_tracker.tau_low);
  const auto rad_left = leftovers(rad_step, radar_dets, config_.radar_tracker.tau_low);

  CheckResult rad_check, cam_check;
  if (config_.enable_crosscheck_detections) {
    auto established = [this](const Tracker & own, const Tracker & other) {
      std::vector<Box3D> boxes;
      for (const Tracker * tracker : {&own, &other}) {
        if (tracker == &other && !config_.crosscheck.screen_against_both) {
          break;
        }
        for (const auto & t : tracker->tracklets()) {
          if (t.status == TrackStatus::active) {
            boxes.push_back(t.box);
          }
        }
      }
      return boxes;
    };
    rad_check = check_unmatched_radar(
      rad_left, established(radar_, camera_), cam_left, *camera_model_, config_.crosscheck);
    cam_check =
      check_unmatched_camera(cam_left, established(camera_, radar_), rad_left, config_.crosscheck);
  } else {
    for (std::size_t i = 0; i < rad_left.size(); ++i) {
      rad_check.candidates.push_back(i);
    }
    for (std::size_t i = 0; i < cam_left.size(); ++i) {
      cam_check.candidates.push_back(i);
    }
  }

  for (const auto & action : cam_recoveries) {
    camera_.apply_recovery(action.target, action.pseudo_box, config_.update_motion);
  }
  for (const auto & action : rad_recoveries) {
    radar_.apply_recovery(action.target, action.pseudo_box, config_.update_motion);
  }

  auto spawn_all = [this](Tracker & tracker, const CheckResult & check,
                          const std::vector<Detection3D> & left, double tau_high) {
    // Detection order keeps ids deterministic.
    std::vector<std::pair<std::size_t, bool>> births;
    for (const auto & c : check.confirmed) {
      births.emplace_back(c.detection, true);
    }
    if (config_.spawn_policy == SpawnPolicy::lenient) {
      for (const std::size_t i : check.candidates) {
        if (left[i].score >= tau_high) {
          births.emplace_back(i, false);
        }
      }
    }
    std::sort(births.begin(), births.end());
    for (const auto & [i, confirmed] : births) {
      tracker.spawn(left[i], confirmed);
    }
  };
  spawn_all(camera_, cam_check, cam_left, config_.camera_tracker.tau_high);
  spawn_all(radar_, rad_check, rad_left, config_.radar_tracker.tau_high);

  camera_.prune();
  radar_.prune();

  FrameOutput out;
  out.frame = frame;
  out.camera_refined = refined_of(camera_);
  out.radar_refined = refined_of(radar_);

  const auto cam_confirmed = confirmed_of(camera_);
  const auto rad_confirmed = confirmed_of(radar_);
  if (config_.enable_pairing) {
    pairs_.update(cam_confirmed, rad_confirmed, config_.fusion);
  } else {
    pairs_.clear();
  }
  std::vector<FusedTrack> fused;
  out.fused = fuse_all(pairs_.pairs(), cam_confirmed, rad_confirmed, config_.fusion, &fused);

  if (config_.fusion.fuse_displacements) {
    std::map<PairId, const FusedTrack *> by_pair;
    for (const auto & f : fused) {
      by_pair.emplace(f.pair, &f);
    }
    for (auto & pair : pairs_.pairs()) {
      if (auto it = by_pair.find(pair.id); it != by_pair.end()) {
        const FusedTrack & f = *it->second;
        pair.last_fused_center = std::array<double, 3>{f.box.x, f.box.y, f.box.z};
        pair.last_camera_center = f.camera_center;
        pair.last_radar_center = f.radar_center;
      }
    }
  }
  return out;
}

std::vector<FrameOutput> run_pipeline(
  std::span<const FrameDetections> camera, std::span<const FrameDetections> radar,
  const BoosterConfig & config, std::optional<CameraModel> camera_model)
{
  std::map<int, std::pair<const FrameDetections *, const FrameDetections *>> frames;
  for (const auto & f : camera) {
    frames[f.frame].first = &f;
  }
  for (const auto & f : radar) {
    frames[f.frame].second = &f;
  }
  BoosterPipeline pipeline(config, std::move(camera_model));
  std::vector<FrameOutput> outputs;
  outputs.reserve(frames.size());
  const std::vector<Detection3D> none;
  for (const auto & [frame, streams] : frames) {
    const auto & cam = streams.first ? streams.first->boxes : none;
    const auto & rad = streams.second ? streams.second->boxes : none;
    outputs.push_back(pipeline.process_frame(frame, cam, rad));
  }
  return outputs;
}

std::vector<FrameTracks> run_single_modality(
  std::span<const FrameDetections> stream, const TrackerConfig & config, Modality modality)
{
  Tracker tracker(config, modality);
  std::vector<FrameTracks> outputs;
  outputs.reserve(stream.size());
  for (const auto & f : stream) {
    tracker.predict(f.frame);
    const StepResult step = tracker.associate(f.boxes);
    for (const std::size_t i : step.unmatched_detections) {
      if (f.boxes[i].score >= config.tau_high) {
        tracker.spawn(f.boxes[i], false);
      }
    }
    tracker.prune();
    FrameTracks out;
    out.frame = f.frame;
    out.tracks = refined_of(tracker);
    outputs.push_back(std::move(out));
  }
  return outputs;
}

}  // namespace trackfuse
