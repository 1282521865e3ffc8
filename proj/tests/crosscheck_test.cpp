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

#include "test_support.hpp"
#include "trackfuse/crosscheck.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace trackfuse
{
namespace
{

using testing::aabb_diou;
using testing::aabb_of;
using testing::det_at;

const CameraModel kCam = CameraModel::forward_facing(1.6);

TrackletPair make_pair_record(PairId id, TrackId cam, TrackId rad)
{
  TrackletPair p;
  p.id = id;
  p.camera_id = cam;
  p.radar_id = rad;
  return p;
}

TEST(Recovery, UnmatchedMemberOfMatchedPairIsRecovered)
{
  const std::vector<TrackletPair> pairs{make_pair_record(7, 1, 2)};
  const Box3D b = testing::box_at(20, 1, 4, 2);
  const std::vector<TrackId> unmatched{1};
  const auto actions = recover_unmatched_tracklets(Modality::camera, unmatched, pairs, {{7, b}});
  ASSERT_EQ(actions.size(), 1u);
  EXPECT_EQ(actions[0].target, 1);
  EXPECT_EQ(actions[0].pair, 7);
  EXPECT_EQ(actions[0].pseudo_box, b);
}

TEST(Recovery, BothMembersUnmatchedGivesNothing)
{
  const std::vector<TrackletPair> pairs{make_pair_record(7, 1, 2)};
  const std::vector<TrackId> unmatched{1};
  EXPECT_TRUE(recover_unmatched_tracklets(Modality::camera, unmatched, pairs, {}).empty());
}

TEST(Recovery, UnpairedTrackletGivesNothing)
{
  const std::vector<TrackletPair> pairs{make_pair_record(7, 1, 2)};
  const std::vector<TrackId> unmatched{5};
  const auto actions =
    recover_unmatched_tracklets(Modality::radar, unmatched, pairs, {{7, testing::box_at(0, 0)}});
  EXPECT_TRUE(actions.empty());
}

TEST(Recovery, ModalitySelectsPairMember)
{
  // Radar id 1 must not be confused with the camera member that shares the number.
  const std::vector<TrackletPair> pairs{make_pair_record(3, 1, 9)};
  const std::vector<TrackId> unmatched{1};
  const auto actions =
    recover_unmatched_tracklets(Modality::radar, unmatched, pairs, {{3, testing::box_at(0, 0)}});
  EXPECT_TRUE(actions.empty());
}

TEST(RadarCheck, DetectionInsideEstablishedRectIsDiscarded)
{
  const std::vector<Detection3D> radar{det_at(20, 0, 0.9, Modality::radar)};
  const std::vector<Box3D> established{Box3D::from_yaw(20, 0, 0, 6, 4, 4, 0)};
  const auto r = check_unmatched_radar(radar, established, {}, kCam, CrossCheckConfig{});
  EXPECT_EQ(r.discarded, std::vector<std::size_t>{0});
  EXPECT_TRUE(r.confirmed.empty());
  EXPECT_TRUE(r.candidates.empty());
}

TEST(RadarCheck, ExactImageMatchIsConfirmed)
{
  const std::vector<Detection3D> radar{det_at(20, 0, 0.9, Modality::radar)};
  const std::vector<Detection3D> camera{det_at(40, 5), det_at(20, 0)};
  const auto r = check_unmatched_radar(radar, {}, camera, kCam, CrossCheckConfig{});
  ASSERT_EQ(r.confirmed.size(), 1u);
  EXPECT_EQ(r.confirmed[0].detection, 0u);
  EXPECT_EQ(r.confirmed[0].matched_detection, 1u);
  EXPECT_EQ(r.confirmed[0].view, CheckView::perspective);
  EXPECT_NEAR(r.confirmed[0].cost, 0.0, 1e-12);
}

TEST(RadarCheck, BehindCameraBecomesCandidate)
{
  const std::vector<Detection3D> radar{det_at(-20, 0, 0.9, Modality::radar)};
  const std::vector<Box3D> established{Box3D::from_yaw(-20, 0, 0, 6, 4, 4, 0)};
  const std::vector<Detection3D> camera{det_at(20, 0)};
  const auto r = check_unmatched_radar(radar, established, camera, kCam, CrossCheckConfig{});
  EXPECT_TRUE(r.discarded.empty());
  EXPECT_TRUE(r.confirmed.empty());
  EXPECT_EQ(r.candidates, std::vector<std::size_t>{0});
}

TEST(CameraCheck, CoincidentWithEstablishedIsDiscarded)
{
  const std::vector<Detection3D> camera{det_at(20, 0)};
  const std::vector<Box3D> established{det_at(20, 0).box};
  const auto r = check_unmatched_camera(camera, established, {}, CrossCheckConfig{});
  EXPECT_EQ(r.discarded, std::vector<std::size_t>{0});
}

TEST(CameraCheck, NearbyRadarDetectionConfirms)
{
  const std::vector<Detection3D> camera{det_at(21, 0)};
  const std::vector<Detection3D> radar{det_at(20, 0, 0.9, Modality::radar)};
  const auto r = check_unmatched_camera(camera, {}, radar, CrossCheckConfig{});
  ASSERT_EQ(r.confirmed.size(), 1u);
  EXPECT_EQ(r.confirmed[0].view, CheckView::bev);
  const double expected = aabb_diou(aabb_of(21, 0, 4, 2), aabb_of(20, 0, 4, 2));
  EXPECT_NEAR(expected, 0.4 + 1.0 / 29.0, 1e-15);
  EXPECT_NEAR(r.confirmed[0].cost, expected, 1e-9);
}

TEST(CameraCheck, NoRadarDetectionsLeavesCandidates)
{
  const std::vector<Detection3D> camera{det_at(21, 0), det_at(40, 3)};
  const auto r = check_unmatched_camera(camera, {}, {}, CrossCheckConfig{});
  EXPECT_TRUE(r.confirmed.empty());
  EXPECT_EQ(r.candidates, (std::vector<std::size_t>{0, 1}));
}

void expect_partition(const CheckResult & r, std::size_t n)
{
  std::set<std::size_t> seen;
  for (auto i : r.discarded) {
    ASSERT_TRUE(seen.insert(i).second);
  }
  std::set<std::size_t> opposite;
  for (const auto & c : r.confirmed) {
    ASSERT_TRUE(seen.insert(c.detection).second);
    ASSERT_TRUE(opposite.insert(c.matched_detection).second);
  }
  for (auto i : r.candidates) {
    ASSERT_TRUE(seen.insert(i).second);
  }
  EXPECT_EQ(seen.size(), n);
  if (!seen.empty()) {
    EXPECT_LT(*seen.rbegin(), n);
  }
}

TEST(CrossCheck, OutcomesPartitionTheInput)
{
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> fwd(-10, 70), lat(-12, 12);
  auto dets = [&](int n, Modality m) {
    std::vector<Detection3D> out;
    for (int i = 0; i < n; ++i) {
      out.push_back(det_at(fwd(rng), lat(rng), 0.8, m));
    }
    return out;
  };
  const CrossCheckConfig cfg;
  for (int trial = 0; trial < 300; ++trial) {
    const auto radar = dets(trial % 6, Modality::radar);
    const auto camera = dets((trial / 6) % 6, Modality::camera);
    std::vector<Box3D> established;
    for (const auto & d : dets(trial % 4, Modality::camera)) {
      established.push_back(d.box);
    }
    const auto rr = check_unmatched_radar(radar, established, camera, kCam, cfg);
    expect_partition(rr, radar.size());
    for (const auto & c : rr.confirmed) {
      EXPECT_LE(c.cost, 1.0 - cfg.image_iou_gate + 1e-12);
    }
    const auto cr = check_unmatched_camera(camera, established, radar, cfg);
    expect_partition(cr, camera.size());
    for (const auto & c : cr.confirmed) {
      EXPECT_LE(c.cost, cfg.diou_gate);
    }
  }
}

}  // namespace
}  // namespace trackfuse
