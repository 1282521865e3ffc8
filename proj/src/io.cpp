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

#include "trackfuse/io.hpp"

#include "trackfuse/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

namespace trackfuse
{

namespace
{

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr const char * kBoxKeys[] = {"x", "y", "z", "l", "w", "h", "sin_yaw", "cos_yaw"};

json parse_object(std::string_view text)
{
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw SchemaError("expected a JSON object");
  }
  return j;
}

const json & field(const json & obj, const char * key)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  return *it;
}

double number(const json & obj, const char * key)
{
  const json & v = field(obj, key);
  if (!v.is_number()) {
    throw SchemaError(std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

std::int64_t integer(const json & obj, const char * key)
{
  const json & v = field(obj, key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

int frame_number(const json & obj)
{
  const std::int64_t f = integer(obj, "frame");
  if (f < std::numeric_limits<int>::min() || f > std::numeric_limits<int>::max()) {
    throw SchemaError("field 'frame' out of range");
  }
  return static_cast<int>(f);
}

const json & array(const json & obj, const char * key)
{
  const json & v = field(obj, key);
  if (!v.is_array()) {
    throw SchemaError(std::string("field '") + key + "' must be an array");
  }
  return v;
}

Box3D parse_box(const json & obj)
{
  if (!obj.is_object()) {
    throw SchemaError("box entry must be an object");
  }
  double v[8];
  for (int i = 0; i < 8; ++i) {
    v[i] = number(obj, kBoxKeys[i]);
  }
  try {
    return Box3D(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
  } catch (const std::invalid_argument & e) {
    throw SchemaError(std::string("invalid box: ") + e.what());
  }
}

void put_box(ojson & obj, const Box3D & b)
{
  obj["x"] = b.x;
  obj["y"] = b.y;
  obj["z"] = b.z;
  obj["l"] = b.l;
  obj["w"] = b.w;
  obj["h"] = b.h;
  obj["sin_yaw"] = b.sin_yaw;
  obj["cos_yaw"] = b.cos_yaw;
}

ojson optional_number(const std::optional<double> & v) { return v ? ojson(*v) : ojson(nullptr); }

std::optional<double> parse_optional(const json & obj, const char * key)
{
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_number()) {
    throw SchemaError(std::string("field '") + key + "' must be a number or null");
  }
  return it->get<double>();
}

TrackSource parse_source(const json & obj)
{
  const json & v = field(obj, "source");
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "fused") {
      return TrackSource::fused;
    }
    if (s == "camera") {
      return TrackSource::camera;
    }
    if (s == "radar") {
      return TrackSource::radar;
    }
  }
  throw SchemaError("field 'source' must be one of fused, camera, radar");
}

template <typename T>
std::vector<T> parse_jsonl(
  std::string_view text, std::string_view source,
  const std::function<T(std::string_view)> & parse, const std::function<int(const T &)> & frame_of)
{
  std::vector<T> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;
    }
    try {
      T rec = parse(line);
      if (!out.empty() && frame_of(rec) <= frame_of(out.back())) {
        throw SchemaError("frames must strictly increase");
      }
      out.push_back(std::move(rec));
    } catch (const SchemaError & e) {
      throw SchemaError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <typename T, typename F>
std::string join_lines(std::span<const T> frames, F format)
{
  std::string out;
  for (const auto & f : frames) {
    out += format(f);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string format_detection_frame(const FrameDetections & frame)
{
  ojson j;
  j["frame"] = frame.frame;
  j["boxes"] = ojson::array();
  for (const auto & d : frame.boxes) {
    ojson b;
    put_box(b, d.box);
    b["score"] = d.score;
    if (d.has_appearance()) {
      b["embed"] = d.appearance;
    }
    j["boxes"].push_back(std::move(b));
  }
  return j.dump();
}

FrameDetections parse_detection_frame(std::string_view line, Modality modality)
{
  const json j = parse_object(line);
  FrameDetections f;
  f.frame = frame_number(j);
  for (const auto & b : array(j, "boxes")) {
    Detection3D d;
    d.box = parse_box(b);
    d.score = number(b, "score");
    d.modality = modality;
    d.frame = f.frame;
    if (const auto it = b.find("embed"); it != b.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw SchemaError("field 'embed' must be an array");
      }
      for (const auto & e : *it) {
        if (!e.is_number()) {
          throw SchemaError("field 'embed' must hold numbers");
        }
        d.appearance.push_back(e.get<double>());
      }
    }
    f.boxes.push_back(std::move(d));
  }
  return f;
}

std::string format_gt_frame(const LabeledFrame & frame)
{
  ojson j;
  j["frame"] = frame.frame;
  j["objects"] = ojson::array();
  for (const auto & o : frame.boxes) {
    ojson b;
    b["id"] = o.id;
    put_box(b, o.box);
    j["objects"].push_back(std::move(b));
  }
  return j.dump();
}

LabeledFrame parse_gt_frame(std::string_view line)
{
  const json j = parse_object(line);
  LabeledFrame f;
  f.frame = frame_number(j);
  for (const auto & o : array(j, "objects")) {
    f.boxes.push_back({integer(o, "id"), parse_box(o)});
  }
  return f;
}

std::string format_track_frame(const FrameTracks & frame)
{
  ojson j;
  j["frame"] = frame.frame;
  j["boxes"] = ojson::array();
  for (const auto & t : frame.tracks) {
    ojson b;
    b["id"] = t.id;
    put_box(b, t.box);
    b["score"] = t.score;
    b["source"] = std::string(to_string(t.source));
    if (t.pair) {
      b["pair"] = {t.pair->first, t.pair->second};
    }
    j["boxes"].push_back(std::move(b));
  }
  return j.dump();
}

FrameTracks parse_track_frame(std::string_view line)
{
  const json j = parse_object(line);
  FrameTracks f;
  f.frame = frame_number(j);
  for (const auto & b : array(j, "boxes")) {
    OutputTrack t;
    t.id = integer(b, "id");
    t.box = parse_box(b);
    t.score = number(b, "score");
    t.source = parse_source(b);
    if (const auto it = b.find("pair"); it != b.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
          !(*it)[1].is_number_integer())
      {
        throw SchemaError("field 'pair' must be [camera_id, radar_id]");
      }
      t.pair = std::make_pair((*it)[0].get<TrackId>(), (*it)[1].get<TrackId>());
    }
    f.tracks.push_back(std::move(t));
  }
  return f;
}

std::string format_calibration(const CameraModel & camera)
{
  ojson j;
  j["fx"] = camera.fx;
  j["fy"] = camera.fy;
  j["cx"] = camera.cx;
  j["cy"] = camera.cy;
  j["width"] = camera.image_width;
  j["height"] = camera.image_height;
  ojson m = ojson::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      m.push_back(camera.ego_to_cam(r, c));
    }
  }
  j["ego_to_cam"] = std::move(m);
  return j.dump(2);
}

CameraModel parse_calibration(std::string_view text)
{
  const json j = parse_object(text);
  CameraModel cam;
  cam.fx = number(j, "fx");
  cam.fy = number(j, "fy");
  cam.cx = number(j, "cx");
  cam.cy = number(j, "cy");
  cam.image_width = number(j, "width");
  cam.image_height = number(j, "height");
  const json & m = array(j, "ego_to_cam");
  if (m.size() != 16) {
    throw SchemaError("field 'ego_to_cam' must hold 16 numbers (row-major 4x4)");
  }
  for (int i = 0; i < 16; ++i) {
    if (!m[static_cast<std::size_t>(i)].is_number()) {
      throw SchemaError("field 'ego_to_cam' must hold numbers");
    }
    cam.ego_to_cam(i / 4, i % 4) = m[static_cast<std::size_t>(i)].get<double>();
  }
  try {
    cam.validate();
  } catch (const std::invalid_argument & e) {
    throw SchemaError(std::string("invalid calibration: ") + e.what());
  }
  return cam;
}

std::string format_report(const MotReport & r)
{
  ojson j;
  if (r.slice) {
    j["slice"] = *r.slice;
  }
  j["mota"] = optional_number(r.mota);
  j["idf1"] = optional_number(r.idf1);
  j["recall"] = optional_number(r.recall);
  j["precision"] = optional_number(r.precision);
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["ids"] = r.ids;
  j["idtp"] = r.idtp;
  j["idfp"] = r.idfp;
  j["idfn"] = r.idfn;
  j["gt_count"] = r.gt_count;
  j["pred_count"] = r.pred_count;
  return j.dump();
}

MotReport parse_report(std::string_view text)
{
  const json j = parse_object(text);
  MotReport r;
  if (const auto it = j.find("slice"); it != j.end() && it->is_string()) {
    r.slice = it->get<std::string>();
  }
  r.mota = parse_optional(j, "mota");
  r.idf1 = parse_optional(j, "idf1");
  r.recall = parse_optional(j, "recall");
  r.precision = parse_optional(j, "precision");
  r.tp = integer(j, "tp");
  r.fp = integer(j, "fp");
  r.fn = integer(j, "fn");
  r.ids = integer(j, "ids");
  r.idtp = integer(j, "idtp");
  r.idfp = integer(j, "idfp");
  r.idfn = integer(j, "idfn");
  r.gt_count = integer(j, "gt_count");
  r.pred_count = integer(j, "pred_count");
  return r;
}

std::string format_slice_csv(std::span<const MotReport> bins)
{
  std::ostringstream os;
  os << "bin,mota,idf1,recall,precision,tp,fp,fn,ids,idtp,idfp,idfn,gt_count,pred_count\n";
  const auto opt = [](const std::optional<double> & v) {
    return v ? ojson(*v).dump() : std::string();
  };
  for (const auto & r : bins) {
    os << r.slice.value_or("") << ',' << opt(r.mota) << ',' << opt(r.idf1) << ','
       << opt(r.recall) << ',' << opt(r.precision) << ',' << r.tp << ',' << r.fp << ',' << r.fn
       << ',' << r.ids << ',' << r.idtp << ',' << r.idfp << ',' << r.idfn << ',' << r.gt_count
       << ',' << r.pred_count << '\n';
  }
  return os.str();
}

std::string read_text(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failure on '" + path.string() + "'");
  }
  return ss.str();
}

void write_text(const std::filesystem::path & path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

std::vector<FrameDetections> parse_detections(
  std::string_view text, std::string_view source, Modality modality)
{
  return parse_jsonl<FrameDetections>(
    text, source, [modality](std::string_view l) { return parse_detection_frame(l, modality); },
    [](const FrameDetections & f) { return f.frame; });
}

std::vector<LabeledFrame> parse_gt(std::string_view text, std::string_view source)
{
  return parse_jsonl<LabeledFrame>(
    text, source, [](std::string_view l) { return parse_gt_frame(l); },
    [](const LabeledFrame & f) { return f.frame; });
}

std::vector<FrameTracks> parse_tracks(std::string_view text, std::string_view source)
{
  return parse_jsonl<FrameTracks>(
    text, source, [](std::string_view l) { return parse_track_frame(l); },
    [](const FrameTracks & f) { return f.frame; });
}

std::vector<FrameDetections> read_detections(const std::filesystem::path & path, Modality modality)
{
  return parse_detections(read_text(path), path.string(), modality);
}

std::vector<LabeledFrame> read_gt(const std::filesystem::path & path)
{
  return parse_gt(read_text(path), path.string());
}

std::vector<FrameTracks> read_tracks(const std::filesystem::path & path)
{
  return parse_tracks(read_text(path), path.string());
}

CameraModel read_calibration(const std::filesystem::path & path)
{
  const std::string text = read_text(path);
  try {
    return parse_calibration(text);
  } catch (const SchemaError & e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::string format_detections(std::span<const FrameDetections> frames)
{
  return join_lines(frames, format_detection_frame);
}

std::string format_gt(std::span<const LabeledFrame> frames)
{
  return join_lines(frames, format_gt_frame);
}

std::string format_tracks(std::span<const FrameTracks> frames)
{
  return join_lines(frames, format_track_frame);
}

}  // namespace trackfuse
