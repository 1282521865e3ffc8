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

#include "trackfuse/fusion.hpp"

#include "trackfuse/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace trackfuse
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

// Entries of both histories sharing a frame, restricted to the last `n`.
std::vector<std::pair<const HistoryEntry *, const HistoryEntry *>> common_frames(
  const Tracklet & a, const Tracklet & b, std::size_t n)
{
  std::vector<std::pair<const HistoryEntry *, const HistoryEntry *>> out;
  auto ia = a.history.begin();
  auto ib = b.history.begin();
  while (ia != a.history.end() && ib != b.history.end()) {
    if (ia->frame < ib->frame) {
      ++ia;
    } else if (ib->frame < ia->frame) {
      ++ib;
    } else {
      out.emplace_back(&*ia, &*ib);
      ++ia;
      ++ib;
    }
  }
  if (out.size() > n) {
    out.erase(out.begin(), out.end() - static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

}  // namespace

std::string_view to_string(PairingMetric m)
{
  switch (m) {
    case PairingMetric::iou:
      return "iou";
    case PairingMetric::aop:
      return "aop";
    case PairingMetric::cd:
      return "cd";
  }
  return "cd";
}

std::string_view to_string(FusionWeighting w)
{
  switch (w) {
    case FusionWeighting::uniform:
      return "uniform";
    case FusionWeighting::weighted_sum:
      return "weighted_sum";
    case FusionWeighting::softmax:
      return "softmax";
  }
  return "softmax";
}

std::string_view to_string(TrackSource s)
{
  switch (s) {
    case TrackSource::fused:
      return "fused";
    case TrackSource::camera:
      return "camera";
    case TrackSource::radar:
      return "radar";
  }
  return "fused";
}

double FusionConfig::gate() const
{
  switch (metric) {
    case PairingMetric::iou:
      return gate_iou;
    case PairingMetric::aop:
      return gate_aop;
    case PairingMetric::cd:
      return gate_cd;
  }
  return gate_cd;
}

double pair_cost_avg_iou(const Tracklet & a, const Tracklet & b, std::size_t n)
{
  const auto common = common_frames(a, b, n);
  if (common.empty()) {
    return kInf;
  }
  double sum = 0.0;
  for (const auto & [ea, eb] : common) {
    sum += bev_iou(bev_footprint(ea->box), bev_footprint(eb->box));
  }
  return 1.0 - sum / static_cast<double>(common.size());
}

double pair_cost_avg_aop(const Tracklet & a, const Tracklet & b, std::size_t n)
{
  const auto common = common_frames(a, b, n);
  if (common.size() < 2) {
    return kInf;
  }
  // Polyline of a forward, then polyline of b backward, closes the polygon.
  std::vector<Vec2> polygon;
  polygon.reserve(2 * common.size());
  for (const auto & entry : common) {
    polygon.push_back(entry.first->box.bev_center());
  }
  for (auto it = common.rbegin(); it != common.rend(); ++it) {
    polygon.push_back(it->second->box.bev_center());
  }
  return polygon_area(polygon) / static_cast<double>(common.size());
}

double pair_cost_avg_cd(const Tracklet & a, const Tracklet & b, std::size_t n)
{
  const auto common = common_frames(a, b, n);
  if (common.empty()) {
    return kInf;
  }
  double sum = 0.0;
  for (const auto & [ea, eb] : common) {
    sum += bev_distance(ea->box, eb->box);
  }
  return sum / static_cast<double>(common.size());
}

double pair_cost(const Tracklet & a, const Tracklet & b, PairingMetric metric, std::size_t n)
{
  switch (metric) {
    case PairingMetric::iou:
      return pair_cost_avg_iou(a, b, n);
    case PairingMetric::aop:
      return pair_cost_avg_aop(a, b, n);
    case PairingMetric::cd:
      return pair_cost_avg_cd(a, b, n);
  }
  return kInf;
}

std::vector<TrackletPair> pair_tracklets(
  std::span<const Tracklet * const> camera, std::span<const Tracklet * const> radar,
  PairingMetric metric, double gate, std::size_t n, PairId & next_id)
{
  CostMatrix cost(camera.size(), radar.size());
  for (std::size_t r = 0; r < camera.size(); ++r) {
    for (std::size_t c = 0; c < radar.size(); ++c) {
      cost(r, c) = pair_cost(*camera[r], *radar[c], metric, n);
    }
  }
  std::vector<TrackletPair> pairs;
  for (const auto & [r, c] : solve_assignment(cost, gate).matches) {
    TrackletPair p;
    p.id = next_id++;
    p.camera_id = camera[r]->id;
    p.radar_id = radar[c]->id;
    p.cost = cost(r, c);
    p.frames_paired = 1;
    pairs.push_back(p);
  }
  return pairs;
}

void PairRegistry::update(
  std::span<const Tracklet * const> camera, std::span<const Tracklet * const> radar,
  const FusionConfig & config)
{
  std::map<TrackId, const Tracklet *> cams, rads;
  for (const auto * t : camera) {
    cams.emplace(t->id, t);
  }
  for (const auto * t : radar) {
    rads.emplace(t->id, t);
  }

  const double gate = config.gate();
  std::vector<TrackletPair> kept;
  std::set<TrackId> used_cam, used_rad;
  for (auto & pair : pairs_) {
    const auto ic = cams.find(pair.camera_id);
    const auto ir = rads.find(pair.radar_id);
    if (ic == cams.end() || ir == rads.end()) {
      continue;
    }
    const double cost = pair_cost(*ic->second, *ir->second, config.metric, config.history_len);
    if (cost <= gate) {
      pair.failing_frames = 0;
      pair.cost = cost;
    } else if (++pair.failing_frames >= config.dissolve_after) {
      continue;
    }
    pair.frames_paired += 1;
    used_cam.insert(pair.camera_id);
    used_rad.insert(pair.radar_id);
    kept.push_back(pair);
  }

  std::vector<const Tracklet *> free_cam, free_rad;
  for (const auto * t : camera) {
    if (!used_cam.contains(t->id)) {
      free_cam.push_back(t);
    }
  }
  for (const auto * t : radar) {
    if (!used_rad.contains(t->id)) {
      free_rad.push_back(t);
    }
  }
  auto fresh = pair_tracklets(free_cam, free_rad, config.metric, gate, config.history_len, next_id_);
  kept.insert(kept.end(), fresh.begin(), fresh.end());
  pairs_ = std::move(kept);
}

double displacement_sigma(std::span<const double> displacements, bool std_sample)
{
  const std::size_t n = displacements.size();
  if (n < 2) {
    return kInf;
  }
  double mean = 0.0;
  for (const double d : displacements) {
    mean += d;
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double d : displacements) {
    ss += (d - mean) * (d - mean);
  }
  const double denom = static_cast<double>(n - 1);
  return std_sample ? std::sqrt(ss / denom) : std::sqrt(ss) / denom;
}

DisplacementWindow displacement_std(const Tracklet & t, std::size_t n, bool std_sample)
{
  DisplacementWindow window;
  const std::size_t count = std::min(n, t.history.size());
  const std::size_t start = t.history.size() - count;
  for (std::size_t i = start + 1; i < t.history.size(); ++i) {
    const auto & prev = t.history[i - 1];
    const auto & cur = t.history[i];
    const double gap = static_cast<double>(std::max(1, cur.frame - prev.frame));
    window.displacements.push_back(bev_distance(prev.box, cur.box) / gap);
  }
  if (!window.displacements.empty()) {
    for (const double d : window.displacements) {
      window.mean += d;
    }
    window.mean /= static_cast<double>(window.displacements.size());
  }
  window.sigma = displacement_sigma(window.displacements, std_sample);
  return window;
}

std::pair<double, double> fusion_weights(
  double sigma1, double sigma2, FusionWeighting weighting, bool inverse_softmax_weights)
{
  const bool inf1 = std::isinf(sigma1);
  const bool inf2 = std::isinf(sigma2);
  if (weighting == FusionWeighting::uniform || (inf1 && inf2)) {
    return {0.5, 0.5};
  }
  if (inf1) {
    return {0.0, 1.0};
  }
  if (inf2) {
    return {1.0, 0.0};
  }
  if (weighting == FusionWeighting::weighted_sum) {
    if (sigma1 == 0.0 && sigma2 == 0.0) {
      return {0.5, 0.5};
    }
    if (sigma1 == 0.0) {
      return {1.0, 0.0};
    }
    if (sigma2 == 0.0) {
      return {0.0, 1.0};
    }
    const double r1 = 1.0 / sigma1;
    const double r2 = 1.0 / sigma2;
    return {r1 / (r1 + r2), r2 / (r1 + r2)};
  }
  if (inverse_softmax_weights) {
    // 1 / (e^s_m / (e^s_1 + e^s_2)), written relative to each member.
    return {1.0 + std::exp(sigma2 - sigma1), 1.0 + std::exp(sigma1 - sigma2)};
  }
  const double w1 = 1.0 / (1.0 + std::exp(sigma1 - sigma2));
  return {w1, 1.0 - w1};
}

FusedTrack fuse_pair(
  const TrackletPair & pair, const Tracklet & camera, const Tracklet & radar,
  const FusionConfig & config)
{
  const double s_cam = displacement_std(camera, config.history_len, config.std_sample).sigma;
  const double s_rad = displacement_std(radar, config.history_len, config.std_sample).sigma;
  const auto [w_cam, w_rad] = fusion_weights(s_cam, s_rad, config.weighting, config.inverse_softmax_weights);

  FusedTrack fused;
  fused.pair = pair.id;
  fused.w_camera = w_cam;
  fused.w_radar = w_rad;
  fused.camera_updated = camera.updated_this_frame();
  fused.radar_updated = radar.updated_this_frame();
  fused.score = std::max(camera.score, radar.score);
  fused.camera_center = {camera.box.x, camera.box.y, camera.box.z};
  fused.radar_center = {radar.box.x, radar.box.y, radar.box.z};

  fused.box = w_rad > w_cam ? radar.box : camera.box;
  std::array<double, 3> center{};
  if (config.fuse_displacements && pair.last_fused_center) {
    for (int i = 0; i < 3; ++i) {
      center[i] = (*pair.last_fused_center)[i] +
                  w_cam * (fused.camera_center[i] - pair.last_camera_center[i]) +
                  w_rad * (fused.radar_center[i] - pair.last_radar_center[i]);
    }
  } else {
    for (int i = 0; i < 3; ++i) {
      center[i] = w_cam * fused.camera_center[i] + w_rad * fused.radar_center[i];
    }
  }
  fused.box.x = center[0];
  fused.box.y = center[1];
  fused.box.z = center[2];
  return fused;
}

OutputTrack passthrough_track(const Tracklet & t)
{
  OutputTrack out;
  const bool cam = t.modality == Modality::camera;
  out.id = (cam ? kCameraPassthroughBase : kRadarPassthroughBase) + t.id;
  out.box = t.box;
  out.score = t.score;
  out.source = cam ? TrackSource::camera : TrackSource::radar;
  out.status = t.status;
  return out;
}

std::vector<OutputTrack> fuse_all(
  std::span<const TrackletPair> pairs, std::span<const Tracklet * const> camera,
  std::span<const Tracklet * const> radar, const FusionConfig & config,
  std::vector<FusedTrack> * fused_out)
{
  std::map<TrackId, const Tracklet *> cams, rads;
  for (const auto * t : camera) {
    cams.emplace(t->id, t);
  }
  for (const auto * t : radar) {
    rads.emplace(t->id, t);
  }

  std::vector<OutputTrack> candidates;
  std::set<TrackId> paired_cam, paired_rad;
  for (const auto & pair : pairs) {
    const auto ic = cams.find(pair.camera_id);
    const auto ir = rads.find(pair.radar_id);
    if (ic == cams.end() || ir == rads.end()) {
      continue;
    }
    paired_cam.insert(pair.camera_id);
    paired_rad.insert(pair.radar_id);
    const Tracklet & c = *ic->second;
    const Tracklet & r = *ir->second;
    if (!c.updated_this_frame() && !r.updated_this_frame()) {
      continue;
    }
    const FusedTrack fused = fuse_pair(pair, c, r, config);
    if (fused_out != nullptr) {
      fused_out->push_back(fused);
    }
    OutputTrack out;
    out.id = pair.id;
    out.box = fused.box;
    out.score = fused.score;
    out.source = TrackSource::fused;
    out.status = TrackStatus::active;
    out.pair = std::make_pair(pair.camera_id, pair.radar_id);
    candidates.push_back(out);
  }
  const std::size_t fused_count = candidates.size();

  auto reportable = [](const Tracklet & t) {
    return t.status == TrackStatus::active && t.updated_this_frame();
  };
  for (const auto * t : camera) {
    if (reportable(*t) && !paired_cam.contains(t->id)) {
      candidates.push_back(passthrough_track(*t));
    }
  }
  for (const auto * t : radar) {
    if (reportable(*t) && !paired_rad.contains(t->id)) {
      candidates.push_back(passthrough_track(*t));
    }
  }
  std::stable_sort(
    candidates.begin() + static_cast<std::ptrdiff_t>(fused_count), candidates.end(),
    [](const OutputTrack & a, const OutputTrack & b) { return a.score > b.score; });

  std::vector<OutputTrack> kept;
  std::vector<BevRect> kept_rects;
  for (const auto & cand : candidates) {
    const BevRect rect = bev_footprint(cand.box);
    const bool suppressed =
      std::any_of(kept_rects.begin(), kept_rects.end(), [&](const BevRect & other) {
        return bev_iou(rect, other) > config.dedup_threshold;
      });
    if (!suppressed) {
      kept.push_back(cand);
      kept_rects.push_back(rect);
    }
  }
  return kept;
}

}  // namespace trackfuse
