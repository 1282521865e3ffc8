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

#include "trackfuse/experiment.hpp"

#include "trackfuse/errors.hpp"

#include <cstdio>
#include <future>
#include <sstream>

namespace trackfuse
{

std::vector<LabeledFrame> to_labeled(std::span<const FrameTracks> tracks)
{
  std::vector<LabeledFrame> out;
  out.reserve(tracks.size());
  for (const auto & f : tracks) {
    LabeledFrame lf{f.frame, {}};
    lf.boxes.reserve(f.tracks.size());
    for (const auto & t : f.tracks) {
      lf.boxes.push_back({t.id, t.box});
    }
    out.push_back(std::move(lf));
  }
  return out;
}

std::vector<FrameTracks> select_stream(std::span<const FrameOutput> outputs, OutputStream which)
{
  std::vector<FrameTracks> out;
  out.reserve(outputs.size());
  for (const auto & o : outputs) {
    switch (which) {
      case OutputStream::fused:
        out.push_back({o.frame, o.fused});
        break;
      case OutputStream::camera_refined:
        out.push_back({o.frame, o.camera_refined});
        break;
      case OutputStream::radar_refined:
        out.push_back({o.frame, o.radar_refined});
        break;
    }
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioBundle & bundle, const BoosterConfig & config)
{
  ScenarioResult r;
  r.name = bundle.name;
  const auto score = [&](std::span<const FrameTracks> tracks) {
    return evaluate(bundle.gt, to_labeled(tracks));
  };
  r.camera_baseline =
    score(run_single_modality(bundle.camera, config.camera_tracker, Modality::camera));
  r.radar_baseline = score(run_single_modality(bundle.radar, config.radar_tracker, Modality::radar));
  const auto outputs = run_pipeline(bundle.camera, bundle.radar, config, bundle.camera_model);
  r.fused = score(select_stream(outputs, OutputStream::fused));
  r.camera_refined = score(select_stream(outputs, OutputStream::camera_refined));
  r.radar_refined = score(select_stream(outputs, OutputStream::radar_refined));
  return r;
}

std::vector<ScenarioResult> run_suite(
  std::span<const ScenarioBundle> suite, const BoosterConfig & config, bool parallel)
{
  std::vector<ScenarioResult> results;
  results.reserve(suite.size());
  if (!parallel) {
    for (const auto & b : suite) {
      results.push_back(run_scenario(b, config));
    }
    return results;
  }
  std::vector<std::future<ScenarioResult>> jobs;
  jobs.reserve(suite.size());
  for (const auto & b : suite) {
    jobs.push_back(std::async(std::launch::async, [&b, &config] { return run_scenario(b, config); }));
  }
  for (auto & j : jobs) {
    results.push_back(j.get());
  }
  return results;
}

MotReport pooled(std::span<const MotReport> reports)
{
  MotReport sum;
  for (const auto & r : reports) {
    sum.tp += r.tp;
    sum.fp += r.fp;
    sum.fn += r.fn;
    sum.ids += r.ids;
    sum.idtp += r.idtp;
    sum.idfp += r.idfp;
    sum.idfn += r.idfn;
    sum.gt_count += r.gt_count;
    sum.pred_count += r.pred_count;
  }
  sum.finalize();
  return sum;
}

AblationAxis ablation_axis_from_string(std::string_view s)
{
  if (s == "crosscheck") {
    return AblationAxis::crosscheck;
  }
  if (s == "pairing") {
    return AblationAxis::pairing;
  }
  if (s == "weighting") {
    return AblationAxis::weighting;
  }
  throw SchemaError("invalid field 'axis': expected crosscheck, pairing or weighting");
}

std::string_view to_string(AblationAxis a)
{
  switch (a) {
    case AblationAxis::crosscheck:
      return "crosscheck";
    case AblationAxis::pairing:
      return "pairing";
    case AblationAxis::weighting:
      return "weighting";
  }
  return "crosscheck";
}

std::vector<AblationVariant> ablation_variants(AblationAxis axis, const BoosterConfig & base)
{
  std::vector<AblationVariant> out;
  switch (axis) {
    case AblationAxis::crosscheck: {
      struct Row
      {
        bool tracklets, detections, update;
      };
      for (const Row row : {Row{false, false, false}, Row{false, true, true},
                            Row{true, false, true}, Row{true, true, false},
                            Row{true, true, true}})
      {
        BoosterConfig c = base;
        c.enable_crosscheck_tracklets = row.tracklets;
        c.enable_crosscheck_detections = row.detections;
        c.update_motion = row.update;
        std::string label = std::string(row.tracklets ? "tr" : "-") + "/" +
                            (row.detections ? "det" : "-") + "/" + (row.update ? "upd" : "-");
        out.push_back({std::move(label), c});
      }
      break;
    }
    case AblationAxis::pairing:
      for (PairingMetric m : {PairingMetric::iou, PairingMetric::aop, PairingMetric::cd}) {
        BoosterConfig c = base;
        c.fusion.metric = m;
        out.push_back({std::string(to_string(m)), c});
      }
      break;
    case AblationAxis::weighting:
      for (FusionWeighting w :
           {FusionWeighting::uniform, FusionWeighting::weighted_sum, FusionWeighting::softmax})
      {
        BoosterConfig c = base;
        c.fusion.weighting = w;
        out.push_back({std::string(to_string(w)), c});
      }
      break;
  }
  return out;
}

std::vector<AblationRow> run_ablation(
  std::uint64_t seed, AblationAxis axis, const BoosterConfig & base)
{
  const auto suite = complementary_suite(seed);
  const auto variants = ablation_variants(axis, base);

  // One task per (variant, scenario); each writes only its own slot.
  std::vector<std::vector<std::future<MotReport>>> jobs(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (const auto & bundle : suite) {
      jobs[v].push_back(std::async(std::launch::async, [&bundle, &cfg = variants[v].config] {
        const auto outputs = run_pipeline(bundle.camera, bundle.radar, cfg, bundle.camera_model);
        return evaluate(bundle.gt, to_labeled(select_stream(outputs, OutputStream::fused)));
      }));
    }
  }
  std::vector<AblationRow> rows;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::vector<MotReport> reports;
    for (auto & j : jobs[v]) {
      reports.push_back(j.get());
    }
    rows.push_back({variants[v].label, pooled(reports)});
  }
  return rows;
}

std::string ablation_csv(AblationAxis axis, std::span<const AblationRow> rows)
{
  std::ostringstream os;
  os << "axis,config,idf1,mota,fp,fn,ids\n";
  const auto pct = [](const std::optional<double> & v) {
    if (!v) {
      return std::string();
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * *v);
    return std::string(buf);
  };
  for (const auto & r : rows) {
    os << to_string(axis) << ',' << r.label << ',' << pct(r.fused.idf1) << ','
       << pct(r.fused.mota) << ',' << r.fused.fp << ',' << r.fused.fn << ',' << r.fused.ids
       << '\n';
  }
  return os.str();
}

}  // namespace trackfuse
