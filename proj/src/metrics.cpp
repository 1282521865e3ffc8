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

#include "trackfuse/metrics.hpp"

#include "trackfuse/assignment.hpp"
#include "trackfuse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>

namespace trackfuse
{

void MotReport::finalize()
{
  mota = gt_count > 0 ? std::optional<double>(
                          1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(gt_count))
                      : std::nullopt;
  const std::int64_t id_denom = 2 * idtp + idfp + idfn;
  idf1 = id_denom > 0 ? std::optional<double>(2.0 * static_cast<double>(idtp) / id_denom)
                      : std::nullopt;
  recall = tp + fn > 0 ? std::optional<double>(static_cast<double>(tp) / (tp + fn)) : std::nullopt;
  precision =
    tp + fp > 0 ? std::optional<double>(static_cast<double>(tp) / (tp + fp)) : std::nullopt;
}

bool operator==(const MotReport & a, const MotReport & b)
{
  return a.mota == b.mota && a.idf1 == b.idf1 && a.recall == b.recall &&
         a.precision == b.precision && a.tp == b.tp && a.fp == b.fp && a.fn == b.fn &&
         a.ids == b.ids && a.idtp == b.idtp && a.idfp == b.idfp && a.idfn == b.idfn &&
         a.gt_count == b.gt_count && a.pred_count == b.pred_count && a.slice == b.slice;
}

FrameMatch match_frame(
  std::span<const LabeledBox> gt, std::span<const LabeledBox> pred, double max_distance,
  const std::map<std::int64_t, std::int64_t> & previous)
{
  FrameMatch result;
  std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);

  for (std::size_t g = 0; g < gt.size(); ++g) {
    const auto it = previous.find(gt[g].id);
    if (it == previous.end()) {
      continue;
    }
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (!pred_used[p] && pred[p].id == it->second &&
          bev_distance(gt[g].box, pred[p].box) <= max_distance)
      {
        gt_used[g] = pred_used[p] = 1;
        result.tp.emplace_back(gt[g].id, pred[p].id);
        break;
      }
    }
  }

  std::vector<std::size_t> rows, cols;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) {
      rows.push_back(g);
    }
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) {
      cols.push_back(p);
    }
  }
  CostMatrix cost(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      cost(r, c) = bev_distance(gt[rows[r]].box, pred[cols[c]].box);
    }
  }
  for (const auto & [r, c] : solve_assignment(cost, max_distance).matches) {
    gt_used[rows[r]] = pred_used[cols[c]] = 1;
    result.tp.emplace_back(gt[rows[r]].id, pred[cols[c]].id);
  }
  std::sort(result.tp.begin(), result.tp.end());
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) {
      result.fn.push_back(gt[g].id);
    }
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) {
      result.fp.push_back(pred[p].id);
    }
  }
  return result;
}

namespace
{

using Id = std::int64_t;

struct AlignedFrame
{
  int frame{0};
  const LabeledFrame * gt{nullptr};
  const LabeledFrame * pred{nullptr};

  std::span<const LabeledBox> gt_boxes() const
  {
    return gt ? std::span<const LabeledBox>(gt->boxes) : std::span<const LabeledBox>();
  }
  std::span<const LabeledBox> pred_boxes() const
  {
    return pred ? std::span<const LabeledBox>(pred->boxes) : std::span<const LabeledBox>();
  }
};

std::vector<AlignedFrame> align(std::span<const LabeledFrame> gt, std::span<const LabeledFrame> pred)
{
  std::map<int, AlignedFrame> frames;
  for (const auto & f : gt) {
    frames[f.frame].frame = f.frame;
    frames[f.frame].gt = &f;
  }
  for (const auto & f : pred) {
    frames[f.frame].frame = f.frame;
    frames[f.frame].pred = &f;
  }
  std::vector<AlignedFrame> out;
  out.reserve(frames.size());
  for (auto & [frame, aligned] : frames) {
    out.push_back(aligned);
  }
  return out;
}

struct Evaluation
{
  std::vector<FrameMatch> matches;        // per aligned frame
  std::vector<std::vector<Id>> switches;  // gt ids that switched, per frame
  std::map<Id, Id> identity;              // gt id -> pred id (global IDF1 assignment)
  MotReport report;
};

Evaluation run_evaluation(const std::vector<AlignedFrame> & frames, double max_distance)
{
  Evaluation ev;
  MotReport & rep = ev.report;
  std::map<Id, Id> previous, last_matched;
  std::map<std::pair<Id, Id>, std::int64_t> cooccur;
  std::set<Id> gt_ids, pred_ids;

  for (const auto & f : frames) {
    const auto gt = f.gt_boxes();
    const auto pred = f.pred_boxes();
    FrameMatch m = match_frame(gt, pred, max_distance, previous);
    std::vector<Id> switched;
    previous.clear();
    for (const auto & [g, p] : m.tp) {
      previous[g] = p;
      auto it = last_matched.find(g);
      if (it != last_matched.end() && it->second != p) {
        switched.push_back(g);
      }
      last_matched[g] = p;
    }
    rep.tp += static_cast<std::int64_t>(m.tp.size());
    rep.fp += static_cast<std::int64_t>(m.fp.size());
    rep.fn += static_cast<std::int64_t>(m.fn.size());
    rep.ids += static_cast<std::int64_t>(switched.size());
    rep.gt_count += static_cast<std::int64_t>(gt.size());
    rep.pred_count += static_cast<std::int64_t>(pred.size());

    for (const auto & g : gt) {
      gt_ids.insert(g.id);
      for (const auto & p : pred) {
        if (bev_distance(g.box, p.box) <= max_distance) {
          ++cooccur[{g.id, p.id}];
        }
      }
    }
    for (const auto & p : pred) {
      pred_ids.insert(p.id);
    }
    ev.matches.push_back(std::move(m));
    ev.switches.push_back(std::move(switched));
  }

  // Global identity assignment maximizing the number of identity-true frames.
  const std::vector<Id> gts(gt_ids.begin(), gt_ids.end());
  const std::vector<Id> preds(pred_ids.begin(), pred_ids.end());
  CostMatrix cost(gts.size(), preds.size());
  for (std::size_t r = 0; r < gts.size(); ++r) {
    for (std::size_t c = 0; c < preds.size(); ++c) {
      const auto it = cooccur.find({gts[r], preds[c]});
      cost(r, c) = it == cooccur.end() ? 0.0 : -static_cast<double>(it->second);
    }
  }
  const auto assignment = solve_assignment(cost, std::numeric_limits<double>::max());
  for (const auto & [r, c] : assignment.matches) {
    const auto it = cooccur.find({gts[r], preds[c]});
    if (it != cooccur.end()) {
      rep.idtp += it->second;
      ev.identity[gts[r]] = preds[c];
    }
  }
  rep.idfn = rep.gt_count - rep.idtp;
  rep.idfp = rep.pred_count - rep.idtp;
  rep.finalize();
  return ev;
}

double azimuth_deg(const Box3D & b) { return std::abs(std::atan2(b.y, b.x)) * 180.0 / std::numbers::pi; }

std::size_t bin_of(double value, std::span<const double> edges, bool closed_last)
{
  std::size_t bin = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (value >= edges[i]) {
      bin = i;
    }
  }
  if (closed_last && edges.size() >= 2 && value >= edges.back()) {
    bin = edges.size() - 2;
  }
  return bin;
}

std::string bin_label(std::span<const double> edges, std::size_t i, bool closed_last)
{
  // Integral edges print bare ("10-20"); fractional ones with two decimals
  // ("0.25-0.50").
  const bool integral = std::all_of(
    edges.begin(), edges.end(), [](double v) { return v == std::floor(v); });
  auto fmt = [integral](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), integral ? "%.0f" : "%.2f", v);
    return std::string(buf);
  };
  if (i + 1 < edges.size()) {
    return fmt(edges[i]) + "-" + fmt(edges[i + 1]);
  }
  return closed_last ? fmt(edges[i]) : fmt(edges[i]) + "+";
}

}  // namespace

MotReport evaluate(
  std::span<const LabeledFrame> gt, std::span<const LabeledFrame> pred, double max_distance)
{
  return run_evaluation(align(gt, pred), max_distance).report;
}

std::vector<double> default_bin_edges(SliceAxis axis)
{
  switch (axis) {
    case SliceAxis::distance:
      return {0, 10, 20, 30, 40, 50, 60, 70};
    case SliceAxis::azimuth:
      return {0, 10, 20, 30, 40};
    case SliceAxis::occlusion:
      return {0.0, 0.25, 0.5, 0.75, 1.0};
  }
  return {};
}

std::vector<double> occlusion_rates(
  std::span<const Box3D> boxes, const CameraModel & camera, bool nearer_only)
{
  std::vector<std::optional<ImageRect>> rects;
  std::vector<double> depth;
  rects.reserve(boxes.size());
  for (const auto & b : boxes) {
    rects.push_back(project_box(b, camera));
    const Eigen::Vector4d c = camera.ego_to_cam * Eigen::Vector4d(b.x, b.y, b.z, 1.0);
    depth.push_back(c.z());
  }
  std::vector<double> rates(boxes.size(), 0.0);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!rects[i]) {
      continue;
    }
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      if (i == j || !rects[j] || (nearer_only && depth[j] >= depth[i])) {
        continue;
      }
      rates[i] = std::max(rates[i], overlap_fraction(*rects[i], *rects[j]));
    }
  }
  return rates;
}

std::vector<MotReport> slice_metrics(
  std::span<const LabeledFrame> gt, std::span<const LabeledFrame> pred, SliceAxis axis,
  std::span<const double> edges, const CameraModel * camera, double max_distance)
{
  if (axis == SliceAxis::occlusion && camera == nullptr) {
    throw SchemaError("occlusion slicing requires a camera calibration");
  }
  if (edges.empty()) {
    throw SchemaError("slice bins must not be empty");
  }
  const bool closed_last = axis == SliceAxis::occlusion;
  const std::size_t bins = closed_last ? std::max<std::size_t>(1, edges.size() - 1) : edges.size();

  const auto frames = align(gt, pred);
  const Evaluation ev = run_evaluation(frames, max_distance);
  std::vector<MotReport> reports(bins);

  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    const auto gts = frames[fi].gt_boxes();
    const auto preds = frames[fi].pred_boxes();
    const FrameMatch & m = ev.matches[fi];

    std::vector<double> values(gts.size(), 0.0);
    if (axis == SliceAxis::occlusion) {
      std::vector<Box3D> boxes;
      for (const auto & g : gts) {
        boxes.push_back(g.box);
      }
      values = occlusion_rates(boxes, *camera);
    } else {
      for (std::size_t i = 0; i < gts.size(); ++i) {
        values[i] = axis == SliceAxis::distance ? std::hypot(gts[i].box.x, gts[i].box.y)
                                                : azimuth_deg(gts[i].box);
      }
    }
    std::map<Id, std::size_t> gt_bin;
    std::map<Id, const LabeledBox *> gt_box;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const std::size_t b = bin_of(values[i], edges, closed_last);
      gt_bin[gts[i].id] = b;
      gt_box[gts[i].id] = &gts[i];
      reports[b].gt_count += 1;
    }
    for (const auto & [g, p] : m.tp) {
      reports[gt_bin[g]].tp += 1;
    }
    for (const Id g : m.fn) {
      reports[gt_bin[g]].fn += 1;
    }
    for (const Id g : ev.switches[fi]) {
      reports[gt_bin[g]].ids += 1;
    }

    // Identity-true gt objects this frame, and the pred each one consumed.
    std::map<Id, Id> pred_to_gt_identity;
    for (const auto & g : gts) {
      const auto it = ev.identity.find(g.id);
      if (it == ev.identity.end()) {
        continue;
      }
      for (const auto & p : preds) {
        if (p.id == it->second && bev_distance(g.box, p.box) <= max_distance) {
          reports[gt_bin[g.id]].idtp += 1;
          pred_to_gt_identity[p.id] = g.id;
          break;
        }
      }
    }
    std::map<Id, Id> pred_to_gt_clear;
    for (const auto & [g, p] : m.tp) {
      pred_to_gt_clear[p] = g;
    }

    auto own_bin = [&](const LabeledBox & p) {
      if (axis == SliceAxis::distance) {
        return bin_of(std::hypot(p.box.x, p.box.y), edges, closed_last);
      }
      if (axis == SliceAxis::azimuth) {
        return bin_of(azimuth_deg(p.box), edges, closed_last);
      }
      std::vector<Box3D> boxes{p.box};
      for (const auto & g : gts) {
        boxes.push_back(g.box);
      }
      return bin_of(occlusion_rates(boxes, *camera).front(), edges, closed_last);
    };
    auto attributed_bin = [&](const LabeledBox & p) {
      if (auto it = pred_to_gt_identity.find(p.id); it != pred_to_gt_identity.end()) {
        return gt_bin[it->second];
      }
      if (auto it = pred_to_gt_clear.find(p.id); it != pred_to_gt_clear.end()) {
        return gt_bin[it->second];
      }
      double best = 2.0 * max_distance;
      std::optional<Id> nearest;
      for (const auto & g : gts) {
        const double d = bev_distance(g.box, p.box);
        if (d <= best) {
          best = d;
          nearest = g.id;
        }
      }
      return nearest ? gt_bin[*nearest] : own_bin(p);
    };
    std::set<Id> fp_ids(m.fp.begin(), m.fp.end());
    for (const auto & p : preds) {
      const std::size_t b = attributed_bin(p);
      reports[b].pred_count += 1;
      if (fp_ids.contains(p.id)) {
        reports[b].fp += 1;
      }
    }
  }

  for (std::size_t b = 0; b < bins; ++b) {
    auto & r = reports[b];
    r.idfn = r.gt_count - r.idtp;
    r.idfp = r.pred_count - r.idtp;
    r.finalize();
    r.slice = bin_label(edges, b, closed_last);
  }
  return reports;
}

}  // namespace trackfuse
