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

#include "trackfuse/config.hpp"

#include "trackfuse/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <type_traits>
#include <functional>
#include <vector>

namespace trackfuse
{

namespace
{

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::string & key, const std::string & why)
{
  throw SchemaError("invalid config field '" + key + "': " + why);
}

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ConfigValue scalar_from_text(std::string_view raw, const std::string & where)
{
  ConfigValue v;
  if (raw.empty()) {
    throw SchemaError(where + ": missing value");
  }
  if (raw.front() == '"') {
    const auto close = raw.find('"', 1);
    if (close == std::string_view::npos) {
      throw SchemaError(where + ": unterminated string");
    }
    const auto rest = trim(raw.substr(close + 1));
    if (!rest.empty() && rest.front() != '#') {
      throw SchemaError(where + ": trailing characters after string");
    }
    v.kind = ConfigValue::Kind::string;
    v.text = std::string(raw.substr(1, close - 1));
    return v;
  }
  raw = trim(raw.substr(0, raw.find('#')));
  if (raw == "true" || raw == "false") {
    v.kind = ConfigValue::Kind::boolean;
  } else {
    double probe = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), probe);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) {
      throw SchemaError(where + ": value '" + std::string(raw) + "' is not a number, boolean or string");
    }
    v.kind = ConfigValue::Kind::number;
  }
  v.text = std::string(raw);
  return v;
}

struct Binding
{
  std::string key;
  std::function<void(const std::string & key, const ConfigValue &)> set;
  std::function<ojson()> get;
};

double as_double(const std::string & key, const ConfigValue & v)
{
  double out = 0.0;
  if (v.kind == ConfigValue::Kind::number) {
    const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec == std::errc() && ptr == v.text.data() + v.text.size()) {
      return out;
    }
  }
  bad_field(key, "expected a number");
}

template <typename Int>
Int as_integer(const std::string & key, const ConfigValue & v)
{
  Int out{};
  if (v.kind == ConfigValue::Kind::number) {
    const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec == std::errc() && ptr == v.text.data() + v.text.size()) {
      return out;
    }
  }
  bad_field(key, "expected an integer");
}

bool as_bool(const std::string & key, const ConfigValue & v)
{
  if (v.kind != ConfigValue::Kind::boolean) {
    bad_field(key, "expected true or false");
  }
  return v.text == "true";
}

const std::string & as_string(const std::string & key, const ConfigValue & v)
{
  if (v.kind != ConfigValue::Kind::string) {
    bad_field(key, "expected a string");
  }
  return v.text;
}

Binding bind_field(std::string key, double & field)
{
  return {std::move(key), [&field](const std::string & k, const ConfigValue & v) {
            field = as_double(k, v);
          },
          [&field] { return ojson(field); }};
}

template <typename Int>
  requires(std::is_integral_v<Int> && !std::is_same_v<Int, bool>)
Binding bind_field(std::string key, Int & field)
{
  return {std::move(key), [&field](const std::string & k, const ConfigValue & v) {
            field = as_integer<Int>(k, v);
          },
          [&field] { return ojson(field); }};
}

Binding bind_field(std::string key, bool & field)
{
  return {std::move(key), [&field](const std::string & k, const ConfigValue & v) {
            field = as_bool(k, v);
          },
          [&field] { return ojson(field); }};
}

template <typename Enum>
Binding bind_enum(std::string key, Enum & field, std::vector<Enum> options)
{
  return {std::move(key),
          [&field, options](const std::string & k, const ConfigValue & v) {
            const std::string & s = as_string(k, v);
            std::string names;
            for (const Enum e : options) {
              if (to_string(e) == s) {
                field = e;
                return;
              }
              names += (names.empty() ? "" : ", ") + std::string(to_string(e));
            }
            bad_field(k, "expected one of " + names);
          },
          [&field] { return ojson(std::string(to_string(field))); }};
}

std::vector<Binding> scenario_bindings(ScenarioConfig & c)
{
  std::vector<Binding> b{
    bind_field("seed", c.seed),
    bind_field("frames", c.frames),
    bind_field("objects", c.objects),
    bind_field("lanes", c.lanes),
    bind_field("lane_width", c.lane_width),
    bind_field("curvature", c.curvature),
    bind_field("min_range", c.min_range),
    bind_field("max_range", c.max_range),
    bind_field("lane_speed_max", c.lane_speed_max),
    bind_field("speed_jitter", c.speed_jitter),
    bind_field("lateral_jitter", c.lateral_jitter),
    bind_field("wobble_amplitude", c.wobble_amplitude),
    bind_field("camera_pos_std", c.camera_pos_std),
    bind_field("camera_depth_std", c.camera_depth_std),
    bind_field("camera_depth_std_per_m", c.camera_depth_std_per_m),
    bind_field("camera_size_std", c.camera_size_std),
    bind_field("camera_heading_std", c.camera_heading_std),
    bind_field("camera_occlusion_threshold", c.camera_occlusion_threshold),
    bind_field("camera_miss_rate", c.camera_miss_rate),
    bind_field("camera_miss_burst", c.camera_miss_burst),
    bind_field("camera_fp_rate", c.camera_fp_rate),
    bind_field("camera_occlusion_score_penalty", c.camera_occlusion_score_penalty),
    bind_field("camera_embed_dim", c.camera_embed_dim),
    bind_field("camera_embed_noise", c.camera_embed_noise),
    bind_field("radar_pos_std", c.radar_pos_std),
    bind_field("radar_size_std", c.radar_size_std),
    bind_field("radar_heading_std", c.radar_heading_std),
    bind_field("radar_clutter_radius", c.radar_clutter_radius),
    bind_field("radar_clutter_miss", c.radar_clutter_miss),
    bind_field("radar_miss_rate", c.radar_miss_rate),
    bind_field("radar_miss_burst", c.radar_miss_burst),
    bind_field("radar_fp_rate", c.radar_fp_rate),
    bind_field("tp_score_min", c.tp_score_min),
    bind_field("fp_score_min", c.fp_score_min),
    bind_field("fp_score_max", c.fp_score_max),
    bind_enum("weather", c.weather, {Weather::normal, Weather::rain_sleet, Weather::fog_snow}),
    bind_field("camera_height", c.camera.ego_to_cam(1, 3)),
    bind_field("camera_fx", c.camera.fx),
    bind_field("camera_fy", c.camera.fy),
    bind_field("camera_cx", c.camera.cx),
    bind_field("camera_cy", c.camera.cy),
    bind_field("image_width", c.camera.image_width),
    bind_field("image_height", c.camera.image_height),
  };
  return b;
}

void tracker_bindings(std::vector<Binding> & b, const std::string & p, TrackerConfig & t)
{
  b.push_back(bind_field(p + "history_len", t.history_len));
  b.push_back(bind_field(p + "tau_high", t.tau_high));
  b.push_back(bind_field(p + "tau_low", t.tau_low));
  b.push_back(bind_field(p + "match_gate", t.match_gate));
  b.push_back(bind_field(p + "appearance_weight", t.appearance_weight));
  b.push_back(bind_field(p + "max_lost_frames", t.max_lost_frames));
  b.push_back(bind_field(p + "hit_streak", t.hit_streak));
  b.push_back(bind_field(p + "recover_noise_scale", t.recover_noise_scale));
  b.push_back(bind_field(p + "appearance_momentum", t.appearance_momentum));
  b.push_back(bind_field(p + "process_pos_std", t.process_pos_std));
  b.push_back(bind_field(p + "process_vel_std", t.process_vel_std));
  b.push_back(bind_field(p + "process_size_std", t.process_size_std));
  b.push_back(bind_field(p + "process_heading_std", t.process_heading_std));
  b.push_back(bind_field(p + "meas_pos_std", t.meas_pos_std));
  b.push_back(bind_field(p + "meas_z_std", t.meas_z_std));
  b.push_back(bind_field(p + "meas_size_std", t.meas_size_std));
  b.push_back(bind_field(p + "meas_heading_std", t.meas_heading_std));
  b.push_back(bind_field(p + "init_vel_std", t.init_vel_std));
}

std::vector<Binding> booster_bindings(BoosterConfig & c)
{
  std::vector<Binding> b;
  b.push_back(bind_field("enable_crosscheck_tracklets", c.enable_crosscheck_tracklets));
  b.push_back(bind_field("enable_crosscheck_detections", c.enable_crosscheck_detections));
  b.push_back(bind_field("update_motion", c.update_motion));
  b.push_back(bind_field("enable_pairing", c.enable_pairing));
  b.push_back(bind_enum("spawn_policy", c.spawn_policy, {SpawnPolicy::strict, SpawnPolicy::lenient}));
  tracker_bindings(b, "camera.", c.camera_tracker);
  tracker_bindings(b, "radar.", c.radar_tracker);
  b.push_back(bind_field("crosscheck.occlusion_threshold", c.crosscheck.occlusion_threshold));
  b.push_back(bind_field("crosscheck.image_iou_gate", c.crosscheck.image_iou_gate));
  b.push_back(bind_field("crosscheck.bev_occlusion_threshold", c.crosscheck.bev_occlusion_threshold));
  b.push_back(bind_field("crosscheck.diou_gate", c.crosscheck.diou_gate));
  b.push_back(bind_field("crosscheck.screen_against_both", c.crosscheck.screen_against_both));
  b.push_back(bind_field("fusion.history_len", c.fusion.history_len));
  b.push_back(bind_enum(
    "fusion.metric", c.fusion.metric, {PairingMetric::iou, PairingMetric::aop, PairingMetric::cd}));
  b.push_back(bind_field("fusion.gate_iou", c.fusion.gate_iou));
  b.push_back(bind_field("fusion.gate_aop", c.fusion.gate_aop));
  b.push_back(bind_field("fusion.gate_cd", c.fusion.gate_cd));
  b.push_back(bind_field("fusion.dissolve_after", c.fusion.dissolve_after));
  b.push_back(bind_field("fusion.dedup_threshold", c.fusion.dedup_threshold));
  b.push_back(bind_enum(
    "fusion.weighting", c.fusion.weighting,
    {FusionWeighting::uniform, FusionWeighting::weighted_sum, FusionWeighting::softmax}));
  b.push_back(bind_field("fusion.inverse_softmax_weights", c.fusion.inverse_softmax_weights));
  b.push_back(bind_field("fusion.std_sample", c.fusion.std_sample));
  b.push_back(bind_field("fusion.fuse_displacements", c.fusion.fuse_displacements));
  return b;
}

void apply_entries(const FlatConfig & entries, const std::vector<Binding> & bindings)
{
  for (const auto & [key, value] : entries) {
    const auto it = std::find_if(
      bindings.begin(), bindings.end(), [&key](const Binding & b) { return b.key == key; });
    if (it == bindings.end()) {
      bad_field(key, "unknown key");
    }
    it->set(key, value);
  }
}

std::string snapshot(const std::vector<Binding> & bindings)
{
  ojson j = ojson::object();
  for (const auto & b : bindings) {
    j[b.key] = b.get();
  }
  return j.dump(2);
}

}  // namespace

FlatConfig parse_flat_config(std::string_view text, std::string_view source)
{
  FlatConfig out;
  const std::string src(source);
  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') {
    json j;
    try {
      j = json::parse(body.begin(), body.end());
    } catch (const json::parse_error & e) {
      throw SchemaError(src + ": malformed JSON: " + e.what());
    }
    for (const auto & [key, value] : j.items()) {
      ConfigValue v;
      if (value.is_boolean()) {
        v.kind = ConfigValue::Kind::boolean;
        v.text = value.get<bool>() ? "true" : "false";
      } else if (value.is_number()) {
        v.kind = ConfigValue::Kind::number;
        v.text = value.dump();
      } else if (value.is_string()) {
        v.kind = ConfigValue::Kind::string;
        v.text = value.get<std::string>();
      } else {
        bad_field(key, "nested values are not supported");
      }
      out[key] = std::move(v);
    }
    return out;
  }

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const std::string where = src + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw SchemaError(where + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) {
      throw SchemaError(where + ": empty key");
    }
    out[key] = scalar_from_text(trim(line.substr(eq + 1)), where);
  }
  return out;
}

ScenarioConfig scenario_from_config(const FlatConfig & entries, ScenarioConfig base)
{
  apply_entries(entries, scenario_bindings(base));
  base.validate();
  return base;
}

BoosterConfig booster_from_config(const FlatConfig & entries, BoosterConfig base)
{
  apply_entries(entries, booster_bindings(base));
  base.validate();
  return base;
}

std::string scenario_config_json(const ScenarioConfig & config)
{
  ScenarioConfig copy = config;
  return snapshot(scenario_bindings(copy));
}

std::string booster_config_json(const BoosterConfig & config)
{
  BoosterConfig copy = config;
  return snapshot(booster_bindings(copy));
}

}  // namespace trackfuse
