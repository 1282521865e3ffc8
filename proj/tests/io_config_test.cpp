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
#include "trackfuse/config.hpp"
#include "trackfuse/errors.hpp"
#include "trackfuse/io.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

namespace trackfuse
{
namespace
{

Box3D random_box(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(-50, 50), s(0.1, 5), yaw(-3.14, 3.14);
  return Box3D::from_yaw(u(rng), u(rng), u(rng) / 10, s(rng), s(rng), s(rng), yaw(rng));
}

std::string error_of(const std::function<void()> & f)
{
  try {
    f();
  } catch (const SchemaError & e) {
    return e.what();
  }
  return "";
}

TEST(Io, DetectionFrameRoundTrip)
{
  std::mt19937_64 rng(81);
  for (int i = 0; i < 50; ++i) {
    FrameDetections f{i, {}};
    for (int k = 0; k < i % 4; ++k) {
      Detection3D d;
      d.box = random_box(rng);
      d.score = std::uniform_real_distribution<double>(0, 1)(rng);
      d.modality = Modality::radar;
      d.frame = i;
      if (k == 1) {
        d.appearance = {0.6, 0.8};
      }
      f.boxes.push_back(d);
    }
    const std::string text = format_detection_frame(f);
    const auto back = parse_detection_frame(text, Modality::radar);
    ASSERT_EQ(back.frame, f.frame);
    ASSERT_EQ(back.boxes.size(), f.boxes.size());
    for (std::size_t k = 0; k < f.boxes.size(); ++k) {
      EXPECT_EQ(back.boxes[k].box, f.boxes[k].box);
      EXPECT_EQ(back.boxes[k].score, f.boxes[k].score);
      EXPECT_EQ(back.boxes[k].appearance, f.boxes[k].appearance);
      EXPECT_EQ(back.boxes[k].frame, i);
      EXPECT_EQ(back.boxes[k].modality, Modality::radar);
    }
    EXPECT_EQ(format_detection_frame(back), text);
  }
}

TEST(Io, GtAndTrackFramesRoundTrip)
{
  std::mt19937_64 rng(83);
  LabeledFrame g{4, {{1, random_box(rng)}, {7, random_box(rng)}}};
  const auto gb = parse_gt_frame(format_gt_frame(g));
  ASSERT_EQ(gb.boxes.size(), 2u);
  EXPECT_EQ(gb.boxes[1].id, 7);
  EXPECT_EQ(gb.boxes[1].box, g.boxes[1].box);

  FrameTracks t{5, {}};
  OutputTrack fused;
  fused.id = 3;
  fused.box = random_box(rng);
  fused.score = 0.75;
  fused.source = TrackSource::fused;
  fused.pair = std::make_pair(TrackId{2}, TrackId{9});
  OutputTrack radar;
  radar.id = kRadarPassthroughBase + 4;
  radar.box = random_box(rng);
  radar.source = TrackSource::radar;
  t.tracks = {fused, radar};
  const std::string text = format_track_frame(t);
  const auto tb = parse_track_frame(text);
  ASSERT_EQ(tb.tracks.size(), 2u);
  EXPECT_EQ(tb.tracks[0].pair, fused.pair);
  EXPECT_EQ(tb.tracks[1].id, radar.id);
  EXPECT_EQ(tb.tracks[1].source, TrackSource::radar);
  EXPECT_EQ(tb.tracks[1].box, radar.box);
  EXPECT_EQ(format_track_frame(tb), text);
}

TEST(Io, CalibrationRoundTripAndValidation)
{
  const CameraModel cam = CameraModel::forward_facing(1.7);
  const auto back = parse_calibration(format_calibration(cam));
  EXPECT_EQ(back.fx, cam.fx);
  EXPECT_EQ(back.image_height, cam.image_height);
  EXPECT_EQ(back.ego_to_cam, cam.ego_to_cam);
  EXPECT_THROW(parse_calibration(R"({"fx":1,"fy":1,"cx":0,"cy":0,"width":10,"height":10,"ego_to_cam":[1,2]})"), SchemaError);
  EXPECT_THROW(parse_calibration(R"({"fx":-1,"fy":1,"cx":0,"cy":0,"width":10,"height":10,"ego_to_cam":[1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1]})"), SchemaError);
}

TEST(Io, ReportRoundTrip)
{
  MotReport r;
  r.tp = 5;
  r.fp = 1;
  r.fn = 2;
  r.ids = 1;
  r.idtp = 4;
  r.idfp = 2;
  r.idfn = 3;
  r.gt_count = 7;
  r.pred_count = 6;
  r.finalize();
  r.slice = "10-20";
  EXPECT_EQ(parse_report(format_report(r)), r);
  MotReport empty;
  empty.finalize();
  const auto text = format_report(empty);
  EXPECT_NE(text.find("\"mota\":null"), std::string::npos);
  EXPECT_EQ(parse_report(text), empty);
}

TEST(Io, PerfectReportText)
{
  std::vector<LabeledFrame> gt{{0, {{1, testing::box_at(10, 0)}}}};
  const auto text = format_report(evaluate(gt, gt));
  EXPECT_EQ(text.rfind("{\"mota\":1.0,\"idf1\":1.0,", 0), 0u) << text;
}

TEST(Io, MalformedLineNamesFileAndLine)
{
  const std::string text = "{\"frame\":0,\"boxes\":[]}\n\n{\"frame\":1,\"boxes\":[\n";
  const auto msg = error_of([&] { parse_detections(text, "cam.jsonl", Modality::camera); });
  EXPECT_EQ(msg.rfind("cam.jsonl:3:", 0), 0u) << msg;

  const std::string missing = "{\"frame\":0,\"boxes\":[{\"x\":1}]}\n";
  const auto msg2 = error_of([&] { parse_detections(missing, "r.jsonl", Modality::radar); });
  EXPECT_EQ(msg2.rfind("r.jsonl:1:", 0), 0u) << msg2;
}

TEST(Io, FramesMustIncrease)
{
  const std::string text = "{\"frame\":2,\"objects\":[]}\n{\"frame\":2,\"objects\":[]}\n";
  const auto msg = error_of([&] { parse_gt(text, "gt.jsonl"); });
  EXPECT_EQ(msg.rfind("gt.jsonl:2:", 0), 0u) << msg;
}

TEST(Io, StreamRoundTrip)
{
  const auto b = generate(sparse_scenario(3));
  const std::string cam = format_detections(b.camera);
  EXPECT_EQ(format_detections(parse_detections(cam, "c", Modality::camera)), cam);
  const std::string gt = format_gt(b.gt);
  EXPECT_EQ(format_gt(parse_gt(gt, "g")), gt);
}

TEST(Io, MissingFileIsIoError)
{
  EXPECT_THROW(read_text("/nonexistent/dir/file.jsonl"), IoError);
}

TEST(Config, BothSyntaxesParse)
{
  const auto a = parse_flat_config(R"({"frames": 50, "weather": "fog_snow", "camera_height": 1.5})");
  const auto b = parse_flat_config("# comment\nframes = 50\nweather = \"fog_snow\"\n\ncamera_height = 1.5 # trailing\n");
  const auto ca = scenario_from_config(a), cb = scenario_from_config(b);
  EXPECT_EQ(ca.frames, 50);
  EXPECT_EQ(cb.frames, 50);
  EXPECT_EQ(cb.weather, Weather::fog_snow);
  EXPECT_EQ(scenario_config_json(ca), scenario_config_json(cb));
}

TEST(Config, UnknownAndIllTypedKeysNameTheField)
{
  const auto msg = error_of([] { scenario_from_config(parse_flat_config("framez = 3")); });
  EXPECT_NE(msg.find("'framez'"), std::string::npos) << msg;
  const auto msg2 = error_of([] { booster_from_config(parse_flat_config("fusion.metric = \"l1\"")); });
  EXPECT_NE(msg2.find("'fusion.metric'"), std::string::npos) << msg2;
  const auto msg3 = error_of([] { booster_from_config(parse_flat_config("update_motion = 3")); });
  EXPECT_NE(msg3.find("'update_motion'"), std::string::npos) << msg3;
  const auto msg4 = error_of([] { parse_flat_config("a = 1\nthis is not valid\n", "x.cfg"); });
  EXPECT_EQ(msg4.rfind("x.cfg:2:", 0), 0u) << msg4;
}

TEST(Config, SnapshotsReloadExactly)
{
  BoosterConfig cfg = BoosterConfig::defaults();
  cfg.fusion.metric = PairingMetric::aop;
  cfg.radar_tracker.tau_high = 0.45;
  cfg.crosscheck.screen_against_both = true;
  const std::string snap = booster_config_json(cfg);
  EXPECT_EQ(booster_config_json(booster_from_config(parse_flat_config(snap))), snap);

  ScenarioConfig sc = dense_scenario(5);
  sc.weather = Weather::rain_sleet;
  const std::string ss = scenario_config_json(sc);
  EXPECT_EQ(scenario_config_json(scenario_from_config(parse_flat_config(ss))), ss);
}

}  // namespace
}  // namespace trackfuse
