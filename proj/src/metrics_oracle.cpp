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

// Exhaustive enumeration reference for the metrics engine. Shares no matching
// code with evaluate(): every assignment is found by enumerating all
// injective maps.

#include "trackfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace trackfuse
{

namespace
{

using Id = std::int64_t;

double center_distance(const Box3D & a, const Box3D & b)
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Best matching of gt rows onto pred columns: most matches first, then least
// total distance. Returns matched (gt index, pred index).
std::vector<std::pair<std::size_t, std::size_t>> enumerate_best(
  const std::vector<const LabeledBox *> & gts, const std::vector<const LabeledBox *> & preds,
  double max_distance)
{
  std::vector<std::pair<std::size_t, std::size_t>> best, current;
  std::size_t best_count = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<char> used(preds.size(), 0);

  std::function<void(std::size_t, double)> recurse = [&](std::size_t g, double cost) {
    if (g == gts.size()) {
      if (current.size() > best_count || (current.size() == best_count && cost < best_cost)) {
        best = current;
        best_count = current.size();
        best_cost = cost;
      }
      return;
    }
    recurse(g + 1, cost);
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (used[p]) {
        continue;
      }
      const double d = center_distance(gts[g]->box, preds[p]->box);
      if (d > max_distance) {
        continue;
      }
      used[p] = 1;
      current.emplace_back(g, p);
      recurse(g + 1, cost + d);
      current.pop_back();
      used[p] = 0;
    }
  };
  recurse(0, 0.0);
  return best;
}

}  // namespace

MotReport brute_force_oracle(
  std::span<const LabeledFrame> gt, std::span<const LabeledFrame> pred, double max_distance)
{
  std::map<int, std::pair<std::vector<LabeledBox>, std::vector<LabeledBox>>> frames;
  std::set<Id> gt_ids, pred_ids;
  for (const auto & f : gt) {
    auto & slot = frames[f.frame].first;
    slot.insert(slot.end(), f.boxes.begin(), f.boxes.end());
    for (const auto & b : f.boxes) {
      gt_ids.insert(b.id);
    }
  }
  for (const auto & f : pred) {
    auto & slot = frames[f.frame].second;
    slot.insert(slot.end(), f.boxes.begin(), f.boxes.end());
    for (const auto & b : f.boxes) {
      pred_ids.insert(b.id);
    }
  }
  if (gt_ids.size() > 6 || pred_ids.size() > 6 || frames.size() > 20) {
    throw std::invalid_argument("brute_force_oracle: instance too large");
  }

  MotReport rep;
  std::map<Id, Id> previous, last_matched;
  for (const auto & [frame, boxes] : frames) {
    const auto & [gts, preds] = boxes;
    rep.gt_count += static_cast<std::int64_t>(gts.size());
    rep.pred_count += static_cast<std::int64_t>(preds.size());

    std::vector<char> gt_done(gts.size(), 0), pred_done(preds.size(), 0);
    std::map<Id, Id> current;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      auto it = previous.find(gts[g].id);
      if (it == previous.end()) {
        continue;
      }
      for (std::size_t p = 0; p < preds.size(); ++p) {
        if (!pred_done[p] && preds[p].id == it->second &&
            center_distance(gts[g].box, preds[p].box) <= max_distance)
        {
          gt_done[g] = pred_done[p] = 1;
          current[gts[g].id] = preds[p].id;
          break;
        }
      }
    }
    std::vector<const LabeledBox *> free_gt, free_pred;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!gt_done[g]) {
        free_gt.push_back(&gts[g]);
      }
    }
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (!pred_done[p]) {
        free_pred.push_back(&preds[p]);
      }
    }
    for (const auto & [g, p] : enumerate_best(free_gt, free_pred, max_distance)) {
      current[free_gt[g]->id] = free_pred[p]->id;
    }

    const auto matched = static_cast<std::int64_t>(current.size());
    rep.tp += matched;
    rep.fn += static_cast<std::int64_t>(gts.size()) - matched;
    rep.fp += static_cast<std::int64_t>(preds.size()) - matched;
    for (const auto & [g, p] : current) {
      auto it = last_matched.find(g);
      if (it != last_matched.end() && it->second != p) {
        rep.ids += 1;
      }
      last_matched[g] = p;
    }
    previous = current;
  }

  // Identity term: try every injective map gt id -> pred id.
  const std::vector<Id> gl(gt_ids.begin(), gt_ids.end());
  const std::vector<Id> pl(pred_ids.begin(), pred_ids.end());
  auto identity_true_frames = [&](Id g, Id p) {
    std::int64_t n = 0;
    for (const auto & [frame, boxes] : frames) {
      for (const auto & gb : boxes.first) {
        if (gb.id != g) {
          continue;
        }
        for (const auto & pb : boxes.second) {
          if (pb.id == p && center_distance(gb.box, pb.box) <= max_distance) {
            ++n;
            break;
          }
        }
      }
    }
    return n;
  };
  std::vector<std::vector<std::int64_t>> weight(gl.size(), std::vector<std::int64_t>(pl.size()));
  for (std::size_t i = 0; i < gl.size(); ++i) {
    for (std::size_t j = 0; j < pl.size(); ++j) {
      weight[i][j] = identity_true_frames(gl[i], pl[j]);
    }
  }
  std::int64_t best = 0;
  std::vector<char> used(pl.size(), 0);
  std::function<void(std::size_t, std::int64_t)> recurse = [&](std::size_t i, std::int64_t acc) {
    if (i == gl.size()) {
      best = std::max(best, acc);
      return;
    }
    recurse(i + 1, acc);
    for (std::size_t j = 0; j < pl.size(); ++j) {
      if (!used[j]) {
        used[j] = 1;
        recurse(i + 1, acc + weight[i][j]);
        used[j] = 0;
      }
    }
  };
  recurse(0, 0);
  rep.idtp = best;
  rep.idfn = rep.gt_count - rep.idtp;
  rep.idfp = rep.pred_count - rep.idtp;
  rep.finalize();
  return rep;
}

}  // namespace trackfuse
