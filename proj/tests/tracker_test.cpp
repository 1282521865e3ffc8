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
#include "trackfuse/errors.hpp"
#include "trackfuse/experiment.hpp"
#include "trackfuse/metrics.hpp"
#include "trackfuse/pipeline.hpp"
#include "trackfuse/simulator.hpp"
#include "trackfuse/tracker.hpp"

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include <random>
#include <set>

namespace trackfuse
{
namespace
{

using testing::det_at;

TEST(KalmanPredict, ConstantVelocity)
{
  MotionState s;
  s.mean(8) = 1.0;
  kalman_predict(s, StateMatrix::Zero(), 1);
  EXPECT_DOUBLE_EQ(s.mean(0), 1.0);

  MotionState still;
  still.mean(0) = 3.0;
  kalman_predict(still, StateMatrix::Identity(), 1);
  EXPECT_DOUBLE_EQ(still.mean(0), 3.0);
}

TEST(KalmanPredict, TwoSingleStepsEqualOneDoubleStepForMean)
{
  MotionState a;
  a.mean << 1, 2, 3, 4, 2, 1.5, 0, 1, 0.5, -0.25, 0.1;
  MotionState b = a;
  const StateMatrix q = TrackerConfig{}.process_noise();
  kalman_predict(a, q, 1);
  kalman_predict(a, q, 1);
  kalman_predict(b, q, 2);
  EXPECT_TRUE(a.mean.isApprox(b.mean, 1e-15));
}

TEST(KalmanUpdate, VanishingNoiseReachesMeasurement)
{
  MotionState s;
  s.mean << 0, 0, 0, 4, 2, 1.5, 0, 1, 1, 0, 0;
  s.covariance = StateMatrix::Identity() * 4.0;
  const Box3D target = Box3D::from_yaw(3, -2, 0.5, 4.5, 1.9, 1.6, 0.3);
  kalman_update(s, to_measurement(target), MeasMatrix::Identity() * 1e-14);
  const MeasVector z = to_measurement(target);
  for (int i = 0; i < kMeasDim; ++i) {
    EXPECT_NEAR(s.mean(i), z(i), 1e-6) << i;
  }
}

TEST(KalmanUpdate, CovarianceStaysPositiveDefinite)
{
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 1.0);
  TrackerConfig cfg;
  MotionState s;
  s.mean << 0, 0, 0, 4, 2, 1.5, 0, 1, 0, 0, 0;
  for (int i = 0; i < 1000; ++i) {
    kalman_predict(s, cfg.process_noise(), 1);
    const Box3D meas =
      Box3D::from_yaw(i * 0.5 + n(rng), n(rng), n(rng) * 0.1, 4 + 0.1 * n(rng), 2, 1.5, 0.05 * n(rng));
    kalman_update(s, to_measurement(meas), cfg.measurement_noise());
    const StateMatrix & c = s.covariance;
    ASSERT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-9) << i;
    ASSERT_EQ(Eigen::LLT<StateMatrix>(c).info(), Eigen::Success) << i;
  }
}

TEST(Tracker, FrameRegressionIsRejected)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(5);
  EXPECT_THROW(t.predict(5), FrameRegressionError);
  EXPECT_THROW(t.predict(3), FrameRegressionError);
}

TEST(Tracker, EmptyTrackerLeavesDetectionsUnmatched)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(0);
  const std::vector<Detection3D> dets{det_at(10, 0), det_at(20, 0)};
  const auto r = t.associate(dets);
  EXPECT_TRUE(r.matched.empty());
  EXPECT_EQ(r.unmatched_detections, (std::vector<std::size_t>{0, 1}));
}

TEST(Tracker, CoincidentDetectionMatches)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0), true);
  t.predict(1);
  const std::vector<Detection3D> dets{det_at(10, 0, 0.9, Modality::camera, 1)};
  const auto r = t.associate(dets);
  ASSERT_EQ(r.matched.size(), 1u);
  EXPECT_EQ(r.matched[0], std::make_pair(id, std::size_t{0}));
  EXPECT_TRUE(r.unmatched_tracklets.empty());
}

TEST(Tracker, DistantDetectionDoesNotMatch)
{
  Tracker t(TrackerConfig{}, Modality::radar);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0, 0.9, Modality::radar), true);
  t.predict(1);
  const std::vector<Detection3D> dets{det_at(60, 0, 0.9, Modality::radar, 1)};
  const auto r = t.associate(dets);
  EXPECT_TRUE(r.matched.empty());
  EXPECT_EQ(r.unmatched_tracklets, std::vector<TrackId>{id});
  EXPECT_EQ(r.unmatched_detections, std::vector<std::size_t>{0});
}

TEST(Tracker, LowScoreDetectionOnlyMatchesConfirmedTracklets)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(0);
  t.spawn(det_at(10, 0), false);
  t.spawn(det_at(30, 0), true);
  t.predict(1);
  const std::vector<Detection3D> dets{
    det_at(10, 0, 0.3, Modality::camera, 1), det_at(30, 0, 0.3, Modality::camera, 1)};
  const auto r = t.associate(dets);
  ASSERT_EQ(r.matched.size(), 1u);
  EXPECT_EQ(r.matched[0].second, 1u);
}

TEST(Tracker, SpawnContract)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(0);
  const TrackId a = t.spawn(det_at(10, 0), true);
  const TrackId b = t.spawn(det_at(20, 0), false);
  EXPECT_NE(a, b);
  EXPECT_EQ(t.find(a)->status, TrackStatus::active);
  EXPECT_EQ(t.find(a)->history.size(), 1u);
  EXPECT_EQ(t.find(b)->status, TrackStatus::tentative);
  EXPECT_TRUE(t.find(a)->motion.mean.tail<3>().isZero());
}

TEST(Tracker, TentativePromotedAfterHitStreak)
{
  TrackerConfig cfg;
  cfg.hit_streak = 3;
  Tracker t(cfg, Modality::camera);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0), false);
  for (int f = 1; f <= 2; ++f) {
    t.predict(f);
    const std::vector<Detection3D> dets{det_at(10, 0, 0.9, Modality::camera, f)};
    t.associate(dets);
    t.prune();
  }
  EXPECT_EQ(t.find(id)->status, TrackStatus::active);
}

TEST(Tracker, RecoveryWithoutMotionUpdateKeepsMean)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0), true);
  t.predict(1);
  t.associate({});
  const StateVector before = t.find(id)->motion.mean;
  t.apply_recovery(id, testing::box_at(11, 0.5, 4, 2), false);
  const Tracklet * tr = t.find(id);
  EXPECT_EQ(tr->history.size(), 2u);
  EXPECT_EQ(tr->history.back().source, ObservationSource::recovered);
  EXPECT_EQ(tr->time_since_update, 0);
  EXPECT_EQ(tr->motion.mean, before);
}

TEST(Tracker, RecoveryWithMotionUpdateMovesTowardPseudoBox)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0), true);
  t.predict(1);
  t.associate({});
  const StateVector prior = t.find(id)->motion.mean;
  const Box3D pseudo = testing::box_at(12, 1, 4, 2);
  t.apply_recovery(id, pseudo, true);
  const StateVector post = t.find(id)->motion.mean;
  const MeasVector z = to_measurement(pseudo);
  for (int i : {0, 1}) {
    EXPECT_GT(post(i), std::min(prior(i), z(i)));
    EXPECT_LT(post(i), std::max(prior(i), z(i)));
  }
}

TEST(Tracker, RecoveryOfRemovedTrackletThrows)
{
  TrackerConfig cfg;
  cfg.max_lost_frames = 1;
  Tracker t(cfg, Modality::camera);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0), true);
  for (int f = 1; f <= 2; ++f) {
    t.predict(f);
    t.associate({});
    t.prune();
  }
  EXPECT_EQ(t.find(id), nullptr);
  EXPECT_THROW(t.apply_recovery(id, testing::box_at(0, 0), false), StaleTrackletError);
  EXPECT_THROW(t.apply_recovery(999, testing::box_at(0, 0), false), StaleTrackletError);
}

TEST(Tracker, PruneLifecycle)
{
  TrackerConfig cfg;
  cfg.max_lost_frames = 3;
  Tracker t(cfg, Modality::camera);
  t.predict(0);
  const TrackId kept = t.spawn(det_at(10, 0), true);
  const TrackId dropped = t.spawn(det_at(40, 0), true);
  const TrackId tentative = t.spawn(det_at(70, 0), false);
  for (int f = 1; f <= 4; ++f) {
    t.predict(f);
    const std::vector<Detection3D> dets{det_at(10, 0, 0.9, Modality::camera, f)};
    t.associate(dets);
    t.prune();
    if (f == 1) {
      EXPECT_EQ(t.find(tentative), nullptr);
      EXPECT_EQ(t.find(dropped)->status, TrackStatus::lost);
    }
  }
  EXPECT_NE(t.find(kept), nullptr);
  EXPECT_EQ(t.find(dropped), nullptr);
}

TEST(Tracker, LostTrackletRematchedBecomesActive)
{
  Tracker t(TrackerConfig{}, Modality::camera);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0), true);
  t.predict(1);
  t.associate({});
  t.prune();
  EXPECT_EQ(t.find(id)->status, TrackStatus::lost);
  t.predict(2);
  const std::vector<Detection3D> dets{det_at(10, 0, 0.9, Modality::camera, 2)};
  const auto r = t.associate(dets);
  ASSERT_EQ(r.matched.size(), 1u);
  EXPECT_EQ(t.find(id)->status, TrackStatus::active);
}

TEST(Tracker, HistoryWindowIsBoundedAndIncreasing)
{
  TrackerConfig cfg;
  cfg.history_len = 5;
  Tracker t(cfg, Modality::camera);
  t.predict(0);
  const TrackId id = t.spawn(det_at(10, 0), true);
  for (int f = 1; f < 12; ++f) {
    t.predict(f);
    const std::vector<Detection3D> dets{det_at(10 + 0.5 * f, 0, 0.9, Modality::camera, f)};
    t.associate(dets);
  }
  const auto & h = t.find(id)->history;
  ASSERT_EQ(h.size(), 5u);
  for (std::size_t i = 1; i < h.size(); ++i) {
    EXPECT_LT(h[i - 1].frame, h[i].frame);
  }
  EXPECT_EQ(h.back().frame, 11);
}

TEST(Tracker, PartitionAndInjectivityOnRandomStreams)
{
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int run = 0; run < 20; ++run) {
    Tracker t(TrackerConfig{}, Modality::camera);
    for (int f = 0; f < 40; ++f) {
      t.predict(f);
      std::size_t alive = t.tracklets().size();
      std::vector<Detection3D> dets;
      const int n = static_cast<int>(u(rng) * 8);
      for (int k = 0; k < n; ++k) {
        dets.push_back(det_at(5 + 40 * u(rng), -10 + 20 * u(rng), u(rng), Modality::camera, f));
      }
      const auto r = t.associate(dets);
      std::set<std::size_t> det_seen;
      std::set<TrackId> trk_seen;
      for (const auto & [id, di] : r.matched) {
        ASSERT_TRUE(det_seen.insert(di).second);
        ASSERT_TRUE(trk_seen.insert(id).second);
      }
      for (std::size_t di : r.unmatched_detections) {
        ASSERT_TRUE(det_seen.insert(di).second);
      }
      for (TrackId id : r.unmatched_tracklets) {
        ASSERT_TRUE(trk_seen.insert(id).second);
      }
      EXPECT_EQ(det_seen.size(), dets.size());
      EXPECT_EQ(trk_seen.size(), alive);
      for (std::size_t di : r.unmatched_detections) {
        if (dets[di].score >= t.config().tau_high) {
          t.spawn(dets[di], false);
        }
      }
      t.prune();
      for (const auto & tr : t.tracklets()) {
        if (tr.status == TrackStatus::active) {
          EXPECT_LE(tr.time_since_update, t.config().max_lost_frames);
        }
      }
    }
  }
}

TEST(Tracker, NoiseFreeObjectsGiveOneTrackEachWithoutSwitches)
{
  const auto bundle = generate(ScenarioConfig::zero_corruption(5, 100, 5));
  const auto tracks = run_single_modality(bundle.radar, TrackerConfig{}, Modality::radar);
  std::set<TrackId> ids;
  for (const auto & f : tracks) {
    for (const auto & tr : f.tracks) {
      ids.insert(tr.id);
    }
  }
  EXPECT_EQ(ids.size(), 5u);
  const auto report = evaluate(bundle.gt, to_labeled(tracks));
  EXPECT_EQ(report.ids, 0);
}

}  // namespace
}  // namespace trackfuse
