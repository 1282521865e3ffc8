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

#include "trackfuse/simulator.hpp"

#include "trackfuse/errors.hpp"
#include "trackfuse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trackfuse
{

std::string_view to_string(Weather w)
{
  switch (w) {
    case Weather::normal:
      return "normal";
    case Weather::rain_sleet:
      return "rain_sleet";
    case Weather::fog_snow:
      return "fog_snow";
  }
  return "normal";
}

Weather weather_from_string(std::string_view s)
{
  if (s == "normal") {
    return Weather::normal;
  }
  if (s == "rain_sleet") {
    return Weather::rain_sleet;
  }
  if (s == "fog_snow") {
    return Weather::fog_snow;
  }
  throw SchemaError("invalid config field 'weather': unknown preset '" + std::string(s) + "'");
}

WeatherEffect weather_effect(Weather w)
{
  WeatherEffect e;
  switch (w) {
    case Weather::normal:
      break;
    case Weather::rain_sleet:
      e.camera_miss_scale = 6.0;
      e.camera_burst_scale = 1.5;
      e.camera_noise_scale = 1.8;
      break;
    case Weather::fog_snow:
      e.camera_miss_scale = 3.0;
      e.camera_burst_scale = 1.25;
      e.camera_noise_scale = 1.4;
      e.radar_miss_scale = 1.5;
      e.radar_noise_scale = 1.2;
      break;
  }
  return e;
}

ScenarioConfig ScenarioConfig::zero_corruption(std::uint64_t seed, int frames, int objects)
{
  ScenarioConfig c;
  c.seed = seed;
  c.frames = frames;
  c.objects = objects;
  c.camera_pos_std = c.camera_depth_std = c.camera_depth_std_per_m = 0.0;
  c.camera_size_std = c.camera_heading_std = 0.0;
  c.camera_occlusion_threshold = 1.0;
  c.camera_miss_rate = 0.0;
  c.camera_fp_rate = 0.0;
  c.camera_occlusion_score_penalty = 0.0;
  c.camera_embed_noise = 0.0;
  c.radar_pos_std = c.radar_size_std = c.radar_heading_std = 0.0;
  c.radar_clutter_miss = 0.0;
  c.radar_miss_rate = 0.0;
  c.radar_fp_rate = 0.0;
  c.tp_score_min = 1.0;
  return c;
}

namespace
{

void require(bool ok, const char * field, const char * what)
{
  if (!ok) {
    throw SchemaError(std::string("invalid config field '") + field + "': " + what);
  }
}

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void ScenarioConfig::validate() const
{
  require(frames >= 1, "frames", "must be >= 1");
  require(objects >= 0, "objects", "must be >= 0");
  require(lanes >= 1, "lanes", "must be >= 1");
  require(lane_width > 0.0, "lane_width", "must be > 0");
  require(std::isfinite(curvature), "curvature", "must be finite");
  require(min_range > 0.0, "min_range", "must be > 0");
  require(max_range > min_range, "max_range", "must exceed min_range");
  require(lane_speed_max >= 0.0, "lane_speed_max", "must be >= 0");
  require(speed_jitter >= 0.0, "speed_jitter", "must be >= 0");
  require(lateral_jitter >= 0.0, "lateral_jitter", "must be >= 0");
  require(wobble_amplitude >= 0.0, "wobble_amplitude", "must be >= 0");

  require(camera_pos_std >= 0.0, "camera_pos_std", "must be >= 0");
  require(camera_depth_std >= 0.0, "camera_depth_std", "must be >= 0");
  require(camera_depth_std_per_m >= 0.0, "camera_depth_std_per_m", "must be >= 0");
  require(camera_size_std >= 0.0, "camera_size_std", "must be >= 0");
  require(camera_heading_std >= 0.0, "camera_heading_std", "must be >= 0");
  require(unit(camera_occlusion_threshold), "camera_occlusion_threshold", "must be in [0, 1]");
  require(unit(camera_miss_rate), "camera_miss_rate", "must be in [0, 1]");
  require(camera_miss_burst >= 1.0, "camera_miss_burst", "must be >= 1");
  require(camera_fp_rate >= 0.0, "camera_fp_rate", "must be >= 0");
  require(
    unit(camera_occlusion_score_penalty), "camera_occlusion_score_penalty", "must be in [0, 1]");
  require(camera_embed_dim >= 0, "camera_embed_dim", "must be >= 0");
  require(camera_embed_noise >= 0.0, "camera_embed_noise", "must be >= 0");

  require(radar_pos_std >= 0.0, "radar_pos_std", "must be >= 0");
  require(radar_size_std >= 0.0, "radar_size_std", "must be >= 0");
  require(radar_heading_std >= 0.0, "radar_heading_std", "must be >= 0");
  require(radar_clutter_radius >= 0.0, "radar_clutter_radius", "must be >= 0");
  require(unit(radar_clutter_miss), "radar_clutter_miss", "must be in [0, 1]");
  require(unit(radar_miss_rate), "radar_miss_rate", "must be in [0, 1]");
  require(radar_miss_burst >= 1.0, "radar_miss_burst", "must be >= 1");
  require(radar_fp_rate >= 0.0, "radar_fp_rate", "must be >= 0");

  require(unit(tp_score_min), "tp_score_min", "must be in [0, 1]");
  require(unit(fp_score_min), "fp_score_min", "must be in [0, 1]");
  require(unit(fp_score_max) && fp_score_max >= fp_score_min, "fp_score_max",
    "must be in [fp_score_min, 1]");
  try {
    camera.validate();
  } catch (const std::invalid_argument & e) {
    throw SchemaError(std::string("invalid config field 'camera': ") + e.what());
  }
}

namespace
{

enum Stream : std::uint64_t {
  kLayoutStream = 0,
  kCameraStream = 1,
  kRadarStream = 2,
  kCameraFpStream = 3,
  kRadarFpStream = 4,
};

struct ObjectPath
{
  double x0, speed, lateral, wobble_period, wobble_phase;
  double l, w, h;
  std::vector<double> embedding;
};

// Two-state Markov dropout: stationary miss probability `rate`, mean run of
// consecutive misses `burst`.
class BurstyDropout
{
public:
  bool step(double rate, double burst, double u)
  {
    if (rate <= 0.0) {
      missing_ = false;
    } else if (rate >= 1.0) {
      missing_ = true;
    } else if (!started_) {
      missing_ = u < rate;
    } else if (missing_) {
      missing_ = u >= 1.0 / burst;
    } else {
      missing_ = u < std::min(1.0, rate / (burst * (1.0 - rate)));
    }
    started_ = true;
    return missing_;
  }

private:
  bool started_{false};
  bool missing_{false};
};

std::vector<double> normalized(std::vector<double> v)
{
  double n = 0.0;
  for (double x : v) {
    n += x * x;
  }
  n = std::sqrt(n);
  if (n <= 0.0) {
    v.assign(v.size(), 0.0);
    v[0] = 1.0;
    return v;
  }
  for (double & x : v) {
    x /= n;
  }
  return v;
}

std::vector<ObjectPath> layout(const ScenarioConfig & c)
{
  auto rng = SplitMix64::derive(c.seed, kLayoutStream);
  const double span = std::max(1, c.frames - 1);
  const double road = c.max_range - c.min_range;
  // Cap lane speeds so the whole run stays within the range band.
  const double vmax = std::min(c.lane_speed_max, 0.3 * road / span);
  const double jitter = std::min(c.speed_jitter, 0.05 * road / span);

  std::vector<double> lane_speed(static_cast<std::size_t>(c.lanes));
  for (auto & v : lane_speed) {
    v = rng.uniform(-vmax, vmax);
  }

  std::vector<ObjectPath> paths(static_cast<std::size_t>(c.objects));
  for (int lane = 0; lane < c.lanes; ++lane) {
    std::vector<int> members;
    for (int k = lane; k < c.objects; k += c.lanes) {
      members.push_back(k);
    }
    if (members.empty()) {
      continue;
    }
    const double v = lane_speed[static_cast<std::size_t>(lane)];
    const double margin = (std::abs(v) + jitter) * span;
    const double lo = v < 0.0 ? c.min_range + margin : c.min_range + jitter * span;
    const double hi = v < 0.0 ? c.max_range - jitter * span : c.max_range - margin;
    const double slot = (hi - lo) / static_cast<double>(members.size());
    const double offset = (lane - 0.5 * (c.lanes - 1)) * c.lane_width;
    for (std::size_t j = 0; j < members.size(); ++j) {
      auto & p = paths[static_cast<std::size_t>(members[j])];
      p.x0 = lo + slot * (static_cast<double>(j) + 0.5 + rng.uniform(-0.15, 0.15));
      p.speed = v + rng.uniform(-jitter, jitter);
      p.lateral = offset + rng.uniform(-c.lateral_jitter, c.lateral_jitter);
      p.wobble_period = rng.uniform(60.0, 160.0);
      p.wobble_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      p.l = rng.uniform(3.8, 4.8);
      p.w = rng.uniform(1.7, 2.0);
      p.h = rng.uniform(1.4, 1.7);
    }
  }
  for (auto & p : paths) {
    if (c.camera_embed_dim > 0) {
      std::vector<double> e(static_cast<std::size_t>(c.camera_embed_dim));
      for (auto & x : e) {
        x = rng.normal();
      }
      p.embedding = normalized(std::move(e));
    }
  }
  return paths;
}

Box3D gt_box(const ScenarioConfig & c, const ObjectPath & p, int t)
{
  const double x = p.x0 + p.speed * t;
  const double y = p.lateral + 0.5 * c.curvature * x * x +
                   c.wobble_amplitude *
                     std::sin(2.0 * std::numbers::pi * t / p.wobble_period + p.wobble_phase);
  return Box3D::from_yaw(x, y, 0.5 * p.h, p.l, p.w, p.h, std::atan(c.curvature * x));
}

double clamp_size(double v) { return std::max(0.2, v); }

Box3D false_positive_box(const ScenarioConfig & c, SplitMix64 & rng)
{
  const double r = rng.uniform(c.min_range, c.max_range);
  const double az = rng.uniform(-0.45, 0.45);
  const double l = rng.uniform(3.5, 5.0);
  const double w = rng.uniform(1.6, 2.1);
  const double h = rng.uniform(1.3, 1.8);
  const double yaw = rng.normal(0.0, 0.1);
  return Box3D::from_yaw(r * std::cos(az), r * std::sin(az), 0.5 * h, l, w, h, yaw);
}

int draw_count(double rate, SplitMix64 & rng)
{
  const double whole = std::floor(rate);
  return static_cast<int>(whole) + (rng.bernoulli(rate - whole) ? 1 : 0);
}

}  // namespace

ScenarioBundle generate(const ScenarioConfig & config)
{
  config.validate();
  const ScenarioConfig & c = config;
  const WeatherEffect we = weather_effect(c.weather);
  const double cam_miss = std::min(1.0, c.camera_miss_rate * we.camera_miss_scale);
  const double cam_burst = c.camera_miss_burst * we.camera_burst_scale;
  const double cam_noise = we.camera_noise_scale;
  const double rad_miss = std::min(1.0, c.radar_miss_rate * we.radar_miss_scale);
  const double rad_noise = we.radar_noise_scale;

  ScenarioBundle b;
  b.config = config;
  b.camera_model = c.camera;
  b.name = std::string(to_string(c.weather));

  const auto paths = layout(c);
  auto cam_rng = SplitMix64::derive(c.seed, kCameraStream);
  auto rad_rng = SplitMix64::derive(c.seed, kRadarStream);
  auto cam_fp_rng = SplitMix64::derive(c.seed, kCameraFpStream);
  auto rad_fp_rng = SplitMix64::derive(c.seed, kRadarFpStream);
  std::vector<BurstyDropout> cam_drop(paths.size()), rad_drop(paths.size());

  for (int t = 0; t < c.frames; ++t) {
    LabeledFrame gt{t, {}};
    std::vector<Box3D> boxes;
    for (std::size_t k = 0; k < paths.size(); ++k) {
      boxes.push_back(gt_box(c, paths[k], t));
      gt.boxes.push_back({static_cast<std::int64_t>(k + 1), boxes.back()});
    }
    const auto occlusion = occlusion_rates(boxes, c.camera, true);

    FrameDetections cam{t, {}}, rad{t, {}};
    for (std::size_t k = 0; k < paths.size(); ++k) {
      const Box3D & g = boxes[k];

      // Camera: every draw happens regardless of outcome so that streams stay
      // aligned across presets that differ only in rates.
      {
        const double u_miss = cam_rng.uniform();
        const double n_depth = cam_rng.normal();
        const double n_lat = cam_rng.normal();
        const double n_z = cam_rng.normal();
        const double n_l = cam_rng.normal();
        const double n_w = cam_rng.normal();
        const double n_h = cam_rng.normal();
        const double n_yaw = cam_rng.normal();
        const double u_score = cam_rng.uniform();
        std::vector<double> embed_noise(static_cast<std::size_t>(c.camera_embed_dim));
        for (auto & e : embed_noise) {
          e = cam_rng.normal();
        }

        const bool burst_miss = cam_drop[k].step(cam_miss, cam_burst, u_miss);
        const bool occluded = occlusion[k] > c.camera_occlusion_threshold;
        if (!burst_miss && !occluded) {
          const double range = std::hypot(g.x, g.y);
          const double ux = range > 0.0 ? g.x / range : 1.0;
          const double uy = range > 0.0 ? g.y / range : 0.0;
          const double sd = cam_noise * (c.camera_depth_std + c.camera_depth_std_per_m * range);
          const double sl = cam_noise * c.camera_pos_std;
          const double dd = sd * n_depth;
          const double dl = sl * n_lat;
          Detection3D d;
          d.modality = Modality::camera;
          d.frame = t;
          d.box = Box3D::from_yaw(
            g.x + ux * dd - uy * dl, g.y + uy * dd + ux * dl, g.z + sl * n_z,
            clamp_size(g.l + cam_noise * c.camera_size_std * n_l),
            clamp_size(g.w + cam_noise * c.camera_size_std * n_w),
            clamp_size(g.h + cam_noise * c.camera_size_std * n_h),
            g.yaw() + cam_noise * c.camera_heading_std * n_yaw);
          d.score = (c.tp_score_min + (1.0 - c.tp_score_min) * u_score) *
                    (1.0 - c.camera_occlusion_score_penalty * occlusion[k]);
          if (c.camera_embed_dim > 0) {
            std::vector<double> e = paths[k].embedding;
            for (std::size_t i = 0; i < e.size(); ++i) {
              e[i] += c.camera_embed_noise * embed_noise[i];
            }
            d.appearance = normalized(std::move(e));
          }
          cam.boxes.push_back(std::move(d));
        } else {
          b.stats.camera_misses += 1;
        }
      }

      // Radar.
      {
        const double u_miss = rad_rng.uniform();
        const double u_clutter = rad_rng.uniform();
        const double n_x = rad_rng.normal();
        const double n_y = rad_rng.normal();
        const double n_z = rad_rng.normal();
        const double n_l = rad_rng.normal();
        const double n_w = rad_rng.normal();
        const double n_h = rad_rng.normal();
        const double n_yaw = rad_rng.normal();
        const double u_score = rad_rng.uniform();

        int neighbours = 0;
        for (std::size_t o = 0; o < boxes.size(); ++o) {
          if (o != k && bev_distance(boxes[o], g) <= c.radar_clutter_radius) {
            ++neighbours;
          }
        }
        const double p_clutter = std::min(1.0, c.radar_clutter_miss * neighbours);
        const bool burst_miss = rad_drop[k].step(rad_miss, c.radar_miss_burst, u_miss);
        if (!burst_miss && !(u_clutter < p_clutter)) {
          const double sp = rad_noise * c.radar_pos_std;
          const double ss = rad_noise * c.radar_size_std;
          Detection3D d;
          d.modality = Modality::radar;
          d.frame = t;
          d.box = Box3D::from_yaw(
            g.x + sp * n_x, g.y + sp * n_y, g.z + sp * n_z, clamp_size(g.l + ss * n_l),
            clamp_size(g.w + ss * n_w), clamp_size(g.h + ss * n_h),
            g.yaw() + rad_noise * c.radar_heading_std * n_yaw);
          d.score = c.tp_score_min + (1.0 - c.tp_score_min) * u_score;
          rad.boxes.push_back(std::move(d));
        } else {
          b.stats.radar_misses += 1;
        }
      }
    }

    const int n_cam_fp = draw_count(c.camera_fp_rate, cam_fp_rng);
    for (int i = 0; i < n_cam_fp; ++i) {
      Detection3D d;
      d.modality = Modality::camera;
      d.frame = t;
      d.box = false_positive_box(c, cam_fp_rng);
      d.score = cam_fp_rng.uniform(c.fp_score_min, c.fp_score_max);
      if (c.camera_embed_dim > 0) {
        std::vector<double> e(static_cast<std::size_t>(c.camera_embed_dim));
        for (auto & x : e) {
          x = cam_fp_rng.normal();
        }
        d.appearance = normalized(std::move(e));
      }
      cam.boxes.push_back(std::move(d));
    }
    const int n_rad_fp = draw_count(c.radar_fp_rate, rad_fp_rng);
    for (int i = 0; i < n_rad_fp; ++i) {
      Detection3D d;
      d.modality = Modality::radar;
      d.frame = t;
      d.box = false_positive_box(c, rad_fp_rng);
      d.score = rad_fp_rng.uniform(c.fp_score_min, c.fp_score_max);
      rad.boxes.push_back(std::move(d));
    }
    b.stats.camera_fps += n_cam_fp;
    b.stats.radar_fps += n_rad_fp;
    b.stats.gt_boxes += static_cast<std::int64_t>(gt.boxes.size());

    b.gt.push_back(std::move(gt));
    b.camera.push_back(std::move(cam));
    b.radar.push_back(std::move(rad));
  }
  return b;
}

ScenarioConfig sparse_scenario(std::uint64_t seed)
{
  ScenarioConfig c;
  c.seed = seed;
  c.objects = 6;
  c.lanes = 3;
  return c;
}

ScenarioConfig dense_scenario(std::uint64_t seed)
{
  ScenarioConfig c;
  c.seed = seed;
  c.objects = 12;
  c.lanes = 4;
  return c;
}

std::vector<ScenarioBundle> complementary_suite(std::uint64_t seed)
{
  const std::uint64_t sparse_seed = splitmix64_mix(seed + 1);
  const std::uint64_t dense_seed = splitmix64_mix(seed + 2);
  std::vector<ScenarioBundle> suite;
  for (Weather w : {Weather::normal, Weather::rain_sleet, Weather::fog_snow}) {
    for (bool dense : {false, true}) {
      ScenarioConfig c = dense ? dense_scenario(dense_seed) : sparse_scenario(sparse_seed);
      c.weather = w;
      ScenarioBundle b = generate(c);
      b.name = std::string(to_string(w)) + (dense ? "_dense" : "_sparse");
      suite.push_back(std::move(b));
    }
  }
  return suite;
}

}  // namespace trackfuse
