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

#include "trackfuse/errors.hpp"
#include "trackfuse/io.hpp"
#include "trackfuse/rng.hpp"
#include "trackfuse/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace trackfuse
{
namespace
{

std::int64_t detections_in(std::span<const FrameDetections> s)
{
  std::int64_t n = 0;
  for (const auto & f : s) {
    n += static_cast<std::int64_t>(f.boxes.size());
  }
  return n;
}

double angle_diff(double a, double b)
{
  return std::remainder(a - b, 2 * std::numbers::pi);
}

TEST(SplitMix64, ReferenceSequence)
{
  // Published outputs of the reference C implementation for seed 1234567.
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
  EXPECT_EQ(rng.next(), 4593380528125082431ULL);
  EXPECT_EQ(rng.next(), 16408922859458223821ULL);
}

TEST(SplitMix64, UniformAndNormalMoments)
{
  SplitMix64 rng(99);
  double sum = 0, sum2 = 0, nsum = 0, nsum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
    const double z = rng.normal(2.0, 3.0);
    nsum += z;
    nsum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sum2 / n - 0.25, 1.0 / 12.0, 0.002);
  EXPECT_NEAR(nsum / n, 2.0, 0.03);
  EXPECT_NEAR(std::sqrt(nsum2 / n - 4.0), 3.0, 0.03);
}

TEST(SplitMix64, DerivedStreamsDiffer)
{
  auto a = SplitMix64::derive(42, 1), b = SplitMix64::derive(42, 2), c = SplitMix64::derive(42, 1);
  const auto av = a.next();
  EXPECT_NE(av, b.next());
  EXPECT_EQ(av, c.next());
}

TEST(Generate, ZeroCorruptionCopiesGroundTruth)
{
  const auto b = generate(ScenarioConfig::zero_corruption(9, 30, 6));
  ASSERT_EQ(b.gt.size(), 30u);
  for (std::size_t f = 0; f < b.gt.size(); ++f) {
    ASSERT_EQ(b.camera[f].boxes.size(), b.gt[f].boxes.size());
    ASSERT_EQ(b.radar[f].boxes.size(), b.gt[f].boxes.size());
    for (std::size_t k = 0; k < b.gt[f].boxes.size(); ++k) {
      EXPECT_EQ(b.camera[f].boxes[k].box, b.gt[f].boxes[k].box);
      EXPECT_EQ(b.radar[f].boxes[k].box, b.gt[f].boxes[k].box);
      EXPECT_EQ(b.camera[f].boxes[k].score, 1.0);
      EXPECT_EQ(b.radar[f].boxes[k].score, 1.0);
    }
  }
  EXPECT_EQ(b.gt.front().frame, 0);
  EXPECT_EQ(b.gt.front().boxes.front().id, 1);
}

TEST(Generate, FullCameraMissRateEmptiesCameraStream)
{
  ScenarioConfig c = sparse_scenario(5);
  c.camera_miss_rate = 1.0;
  c.camera_fp_rate = 0.0;
  const auto b = generate(c);
  EXPECT_EQ(detections_in(b.camera), 0);
  EXPECT_GT(detections_in(b.radar), 0);
}

TEST(Generate, SameSeedSameBundle)
{
  const ScenarioConfig c = dense_scenario(77);
  const auto a = generate(c), b = generate(c);
  EXPECT_EQ(format_gt(a.gt), format_gt(b.gt));
  EXPECT_EQ(format_detections(a.camera), format_detections(b.camera));
  EXPECT_EQ(format_detections(a.radar), format_detections(b.radar));
  const auto other = generate(dense_scenario(78));
  EXPECT_NE(format_detections(a.radar), format_detections(other.radar));
}

TEST(Generate, StatsAgreeWithStreams)
{
  for (const auto & b : complementary_suite(42)) {
    std::int64_t gt = 0;
    for (const auto & f : b.gt) {
      gt += static_cast<std::int64_t>(f.boxes.size());
    }
    EXPECT_EQ(b.stats.gt_boxes, gt);
    EXPECT_EQ(detections_in(b.camera), gt - b.stats.camera_misses + b.stats.camera_fps) << b.name;
    EXPECT_EQ(detections_in(b.radar), gt - b.stats.radar_misses + b.stats.radar_fps) << b.name;
  }
}

TEST(Generate, TruePositivesStayWithinSixSigma)
{
  // Dropout and clutter switched off; noise draws are taken regardless of
  // outcome, so the detections keep the same noise as the preset.
  for (auto cfg : {sparse_scenario(42), dense_scenario(43)}) {
    for (Weather w : {Weather::normal, Weather::rain_sleet, Weather::fog_snow}) {
      ScenarioConfig c = cfg;
      c.weather = w;
      c.camera_miss_rate = c.radar_miss_rate = c.radar_clutter_miss = 0.0;
      c.camera_fp_rate = c.radar_fp_rate = 0.0;
      c.camera_occlusion_threshold = 1.0;
      const auto fx = weather_effect(w);
      const auto b = generate(c);
      for (std::size_t f = 0; f < b.gt.size(); ++f) {
        ASSERT_EQ(b.camera[f].boxes.size(), b.gt[f].boxes.size());
        ASSERT_EQ(b.radar[f].boxes.size(), b.gt[f].boxes.size());
        for (std::size_t k = 0; k < b.gt[f].boxes.size(); ++k) {
          const Box3D & g = b.gt[f].boxes[k].box;
          const Box3D & cd = b.camera[f].boxes[k].box;
          const double range = std::hypot(g.x, g.y);
          const double ux = g.x / range, uy = g.y / range;
          const double dx = cd.x - g.x, dy = cd.y - g.y;
          const double sd = fx.camera_noise_scale * (c.camera_depth_std + c.camera_depth_std_per_m * range);
          const double sl = fx.camera_noise_scale * c.camera_pos_std;
          const double ss = fx.camera_noise_scale * c.camera_size_std;
          EXPECT_LT(std::abs(dx * ux + dy * uy), 6 * sd);
          EXPECT_LT(std::abs(-dx * uy + dy * ux), 6 * sl);
          EXPECT_LT(std::abs(cd.z - g.z), 6 * sl);
          EXPECT_LT(std::abs(cd.l - g.l), 6 * ss);
          EXPECT_LT(std::abs(cd.w - g.w), 6 * ss);
          EXPECT_LT(std::abs(cd.h - g.h), 6 * ss);
          EXPECT_LT(std::abs(angle_diff(cd.yaw(), g.yaw())), 6 * fx.camera_noise_scale * c.camera_heading_std);

          const Box3D & rd = b.radar[f].boxes[k].box;
          const double sp = fx.radar_noise_scale * c.radar_pos_std;
          const double rs = fx.radar_noise_scale * c.radar_size_std;
          EXPECT_LT(std::abs(rd.x - g.x), 6 * sp);
          EXPECT_LT(std::abs(rd.y - g.y), 6 * sp);
          EXPECT_LT(std::abs(rd.z - g.z), 6 * sp);
          EXPECT_LT(std::abs(rd.l - g.l), 6 * rs);
          EXPECT_LT(std::abs(rd.w - g.w), 6 * rs);
          EXPECT_LT(std::abs(rd.h - g.h), 6 * rs);
          EXPECT_LT(std::abs(angle_diff(rd.yaw(), g.yaw())), 6 * fx.radar_noise_scale * c.radar_heading_std);
        }
      }
    }
  }
}

TEST(Generate, ValidationNamesTheField)
{
  ScenarioConfig c;
  c.frames = 0;
  try {
    generate(c);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError & e) {
    EXPECT_NE(std::string(e.what()).find("'frames'"), std::string::npos);
  }
  c = ScenarioConfig{};
  c.radar_miss_rate = 1.5;
  EXPECT_THROW(c.validate(), SchemaError);
  c = ScenarioConfig{};
  c.camera_pos_std = -1;
  EXPECT_THROW(c.validate(), SchemaError);
}

TEST(Suite, ShapeAndOrder)
{
  const auto suite = complementary_suite(42);
  ASSERT_EQ(suite.size(), 6u);
  const std::vector<std::string> names{
    "normal_sparse", "normal_dense", "rain_sleet_sparse",
    "rain_sleet_dense", "fog_snow_sparse", "fog_snow_dense"};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(suite[i].name, names[i]);
  }
}

TEST(Suite, RainHurtsCameraAndDensityHurtsRadar)
{
  const auto suite = complementary_suite(42);
  for (std::size_t d = 0; d < 2; ++d) {
    EXPECT_GT(suite[2 + d].stats.camera_misses, suite[d].stats.camera_misses);
  }
  for (std::size_t w = 0; w < 3; ++w) {
    const auto & sparse = suite[2 * w];
    const auto & dense = suite[2 * w + 1];
    EXPECT_GT(dense.stats.radar_misses, sparse.stats.radar_misses) << dense.name;
    // Per-box rate as well, since the dense preset simply has more boxes.
    EXPECT_GT(
      static_cast<double>(dense.stats.radar_misses) / dense.stats.gt_boxes,
      static_cast<double>(sparse.stats.radar_misses) / sparse.stats.gt_boxes);
  }
}

TEST(Weather, ParsingRoundTrips)
{
  for (Weather w : {Weather::normal, Weather::rain_sleet, Weather::fog_snow}) {
    EXPECT_EQ(weather_from_string(to_string(w)), w);
  }
  EXPECT_THROW(weather_from_string("hail"), SchemaError);
}

}  // namespace
}  // namespace trackfuse
