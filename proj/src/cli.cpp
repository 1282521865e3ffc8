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

#include "trackfuse/cli.hpp"

#include "trackfuse/config.hpp"
#include "trackfuse/errors.hpp"
#include "trackfuse/io.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <iostream>
#include <set>

namespace trackfuse
{

namespace
{

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void ensure_dir(const fs::path & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

FlatConfig load_flat(const std::optional<fs::path> & path)
{
  if (!path) {
    return {};
  }
  return parse_flat_config(read_text(*path), path->string());
}

ojson input_record(const fs::path & path, const std::string & bytes)
{
  ojson j;
  j["path"] = path.string();
  j["sha256"] = sha256_hex(bytes);
  return j;
}

// Writes each named output, then a manifest recording their hashes.
void write_outputs(
  const fs::path & dir, const std::vector<std::pair<std::string, std::string>> & files,
  ojson manifest)
{
  ensure_dir(dir);
  ojson hashes = ojson::object();
  for (const auto & [name, content] : files) {
    write_text(dir / name, content);
    hashes[name] = sha256_hex(content);
  }
  manifest["outputs"] = std::move(hashes);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

ojson manifest_header(const std::string & command)
{
  ojson m;
  m["tool"] = "trackfuse";
  m["version"] = kToolVersion;
  m["command"] = command;
  return m;
}

std::vector<std::pair<std::string, std::string>> simulate_files(const ScenarioBundle & b)
{
  return {
    {"gt.jsonl", format_gt(b.gt)},
    {"camera.jsonl", format_detections(b.camera)},
    {"radar.jsonl", format_detections(b.radar)},
    {"calib.json", format_calibration(b.camera_model) + "\n"},
  };
}

void run_simulate(const ScenarioConfig & config, const fs::path & out_dir)
{
  const ScenarioBundle bundle = generate(config);
  ojson m = manifest_header("simulate");
  m["seed"] = config.seed;
  m["config"] = ojson::parse(scenario_config_json(config));
  m["inputs"] = ojson::object();
  write_outputs(out_dir, simulate_files(bundle), std::move(m));
}

struct BoostInputs
{
  std::string camera_text, radar_text;
  std::optional<std::string> calib_text;
};

void run_boost(
  const BoostArgs & args, const BoostInputs & in, const BoosterConfig & config)
{
  std::optional<CameraModel> camera;
  if (args.calib) {
    try {
      camera = parse_calibration(*in.calib_text);
    } catch (const SchemaError & e) {
      throw SchemaError(args.calib->string() + ": " + e.what());
    }
  }
  if (config.enable_crosscheck_detections && !camera) {
    throw SchemaError(
      "missing calibration: the detection cross-check needs --calib (or set "
      "enable_crosscheck_detections = false)");
  }
  const auto cam = parse_detections(in.camera_text, args.camera.string(), Modality::camera);
  const auto rad = parse_detections(in.radar_text, args.radar.string(), Modality::radar);
  const auto outputs = run_pipeline(cam, rad, config, camera);

  ojson m = manifest_header("boost");
  m["seed"] = nullptr;
  m["config"] = ojson::parse(booster_config_json(config));
  ojson inputs;
  inputs["camera"] = input_record(args.camera, in.camera_text);
  inputs["radar"] = input_record(args.radar, in.radar_text);
  if (args.calib) {
    inputs["calib"] = input_record(*args.calib, *in.calib_text);
  }
  m["inputs"] = std::move(inputs);
  write_outputs(
    args.out_dir,
    {
      {"fused.jsonl", format_tracks(select_stream(outputs, OutputStream::fused))},
      {"camera_refined.jsonl", format_tracks(select_stream(outputs, OutputStream::camera_refined))},
      {"radar_refined.jsonl", format_tracks(select_stream(outputs, OutputStream::radar_refined))},
    },
    std::move(m));
}

FlatConfig flat_from_snapshot(const json & snapshot)
{
  if (!snapshot.is_object()) {
    throw SchemaError("manifest field 'config' must be an object");
  }
  return parse_flat_config(snapshot.dump(), "manifest config");
}

void emit(const std::optional<fs::path> & out, const std::string & text)
{
  if (out) {
    if (out->has_parent_path()) {
      ensure_dir(out->parent_path());
    }
    write_text(*out, text);
  } else {
    std::cout << text;
  }
}

}  // namespace

std::string sha256_hex(std::string_view bytes)
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

SliceAxis slice_axis_from_string(std::string_view s)
{
  if (s == "distance") {
    return SliceAxis::distance;
  }
  if (s == "azimuth") {
    return SliceAxis::azimuth;
  }
  if (s == "occlusion") {
    return SliceAxis::occlusion;
  }
  throw SchemaError("invalid field 'slice': expected distance, azimuth or occlusion");
}

Modality modality_from_string(std::string_view s)
{
  if (s == "camera") {
    return Modality::camera;
  }
  if (s == "radar") {
    return Modality::radar;
  }
  throw SchemaError("invalid field 'modality': expected camera or radar");
}

void cmd_simulate(const SimulateArgs & args)
{
  ScenarioConfig config = scenario_from_config(load_flat(args.config));
  if (args.seed) {
    config.seed = *args.seed;
  }
  run_simulate(config, args.out_dir);
}

void cmd_track(const TrackArgs & args)
{
  const BoosterConfig config = booster_from_config(load_flat(args.config));
  const TrackerConfig & tc =
    args.modality == Modality::camera ? config.camera_tracker : config.radar_tracker;
  const std::string text = read_text(args.detections);
  const auto dets = parse_detections(text, args.detections.string(), args.modality);
  const auto tracks = run_single_modality(dets, tc, args.modality);

  ojson m = manifest_header("track");
  m["seed"] = nullptr;
  m["config"] = ojson::parse(booster_config_json(config));
  m["modality"] = std::string(to_string(args.modality));
  ojson inputs;
  inputs["detections"] = input_record(args.detections, text);
  m["inputs"] = std::move(inputs);
  write_outputs(
    args.out_dir, {{std::string(to_string(args.modality)) + "_tracks.jsonl", format_tracks(tracks)}},
    std::move(m));
}

void cmd_boost(const BoostArgs & args)
{
  const BoosterConfig config = booster_from_config(load_flat(args.config));
  BoostInputs in;
  in.camera_text = read_text(args.camera);
  in.radar_text = read_text(args.radar);
  if (args.calib) {
    in.calib_text = read_text(*args.calib);
  }
  run_boost(args, in, config);
}

std::string cmd_eval(const EvalArgs & args)
{
  const auto gt = read_gt(args.gt);
  const auto tracks = read_tracks(args.tracks);
  std::set<int> gt_frames;
  for (const auto & f : gt) {
    gt_frames.insert(f.frame);
  }
  for (const auto & f : tracks) {
    if (!gt_frames.contains(f.frame)) {
      throw SchemaError(
        "frame mismatch: frame " + std::to_string(f.frame) + " of '" + args.tracks.string() +
        "' is absent from '" + args.gt.string() + "'");
    }
  }
  const auto pred = to_labeled(tracks);

  std::string text;
  if (args.slice) {
    std::optional<CameraModel> camera;
    if (args.calib) {
      camera = read_calibration(*args.calib);
    }
    if (*args.slice == SliceAxis::occlusion && !camera) {
      throw SchemaError("--slice occlusion requires --calib");
    }
    const auto edges = default_bin_edges(*args.slice);
    const auto bins = slice_metrics(
      gt, pred, *args.slice, edges, camera ? &*camera : nullptr, args.max_distance);
    text = format_slice_csv(bins);
  } else {
    text = format_report(evaluate(gt, pred, args.max_distance)) + "\n";
  }
  emit(args.out, text);
  return text;
}

std::string cmd_ablate(const AblateArgs & args)
{
  const BoosterConfig base = booster_from_config(load_flat(args.config));
  const auto rows = run_ablation(args.seed, args.axis, base);
  const std::string csv = ablation_csv(args.axis, rows);
  emit(args.out, csv);
  return csv;
}

void cmd_rerun(const fs::path & manifest_path, const fs::path & out_dir)
{
  const std::string text = read_text(manifest_path);
  json m;
  try {
    m = json::parse(text);
  } catch (const json::parse_error & e) {
    throw SchemaError(manifest_path.string() + ": malformed JSON: " + e.what());
  }
  if (!m.is_object() || !m.contains("command") || !m["command"].is_string() ||
      !m.contains("config"))
  {
    throw SchemaError(manifest_path.string() + ": not a trackfuse manifest");
  }
  const auto command = m["command"].get<std::string>();
  if (command == "simulate") {
    run_simulate(scenario_from_config(flat_from_snapshot(m["config"])), out_dir);
    return;
  }
  if (command != "boost") {
    throw SchemaError(manifest_path.string() + ": rerun supports simulate and boost manifests");
  }
  const json & inputs = m["inputs"];
  auto recorded = [&](const char * key) -> std::optional<std::pair<fs::path, std::string>> {
    if (!inputs.contains(key)) {
      return std::nullopt;
    }
    const fs::path p = inputs[key]["path"].get<std::string>();
    std::string bytes = read_text(p);
    if (sha256_hex(bytes) != inputs[key]["sha256"].get<std::string>()) {
      throw SchemaError("input '" + p.string() + "' no longer matches its recorded hash");
    }
    return std::make_pair(p, std::move(bytes));
  };
  const auto cam = recorded("camera");
  const auto rad = recorded("radar");
  if (!cam || !rad) {
    throw SchemaError(manifest_path.string() + ": boost manifest lacks camera or radar input");
  }
  const auto calib = recorded("calib");
  BoostArgs args;
  args.camera = cam->first;
  args.radar = rad->first;
  args.out_dir = out_dir;
  BoostInputs in{cam->second, rad->second, std::nullopt};
  if (calib) {
    args.calib = calib->first;
    in.calib_text = calib->second;
  }
  run_boost(args, in, booster_from_config(flat_from_snapshot(m["config"])));
}

int guarded(const std::function<void()> & body, std::ostream & err)
{
  try {
    body();
    return 0;
  } catch (const SchemaError & e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError & e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace trackfuse
