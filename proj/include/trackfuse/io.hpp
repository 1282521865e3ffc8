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

#ifndef TRACKFUSE__IO_HPP_
#define TRACKFUSE__IO_HPP_

#include "trackfuse/metrics.hpp"
#include "trackfuse/pipeline.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trackfuse
{

// Single records. Formatting yields one JSON object without a trailing
// newline; numbers use the shortest decimal that round-trips. Parsing throws
// SchemaError without location; the file readers below add "file:line".

std::string format_detection_frame(const FrameDetections & frame);
FrameDetections parse_detection_frame(std::string_view line, Modality modality);

std::string format_gt_frame(const LabeledFrame & frame);
LabeledFrame parse_gt_frame(std::string_view line);

std::string format_track_frame(const FrameTracks & frame);
FrameTracks parse_track_frame(std::string_view line);

std::string format_calibration(const CameraModel & camera);
CameraModel parse_calibration(std::string_view text);

std::string format_report(const MotReport & report);
MotReport parse_report(std::string_view text);

/// One row per bin: bin,mota,idf1,recall,precision,tp,fp,fn,ids,idtp,idfp,idfn,gt_count,pred_count.
std::string format_slice_csv(std::span<const MotReport> bins);

std::string read_text(const std::filesystem::path & path);  // throws IoError
void write_text(const std::filesystem::path & path, std::string_view content);  // throws IoError

// JSON Lines. Blank lines are skipped and frames must strictly increase.
// Errors are prefixed with "<source>:<line>: ".
std::vector<FrameDetections> parse_detections(
  std::string_view text, std::string_view source, Modality modality);
std::vector<LabeledFrame> parse_gt(std::string_view text, std::string_view source);
std::vector<FrameTracks> parse_tracks(std::string_view text, std::string_view source);

std::vector<FrameDetections> read_detections(const std::filesystem::path & path, Modality modality);
std::vector<LabeledFrame> read_gt(const std::filesystem::path & path);
std::vector<FrameTracks> read_tracks(const std::filesystem::path & path);
CameraModel read_calibration(const std::filesystem::path & path);

std::string format_detections(std::span<const FrameDetections> frames);
std::string format_gt(std::span<const LabeledFrame> frames);
std::string format_tracks(std::span<const FrameTracks> frames);

}  // namespace trackfuse

#endif  // TRACKFUSE__IO_HPP_
