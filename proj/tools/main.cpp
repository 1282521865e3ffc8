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

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char ** argv)
{
  using namespace trackfuse;

  CLI::App app{"trackfuse: camera-radar tracklet fusion toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  std::string sim_config;
  std::uint64_t sim_seed = 0;
  auto * simulate = app.add_subcommand("simulate", "generate a synthetic scenario");
  simulate->add_option("--config", sim_config, "flat JSON or key = value scenario config");
  auto * seed_opt = simulate->add_option("--seed", sim_seed, "override the config seed");
  simulate->add_option("--out", sim.out_dir, "output directory")->required();

  TrackArgs track;
  std::string track_modality = "camera", track_config;
  auto * track_cmd = app.add_subcommand("track", "run the standalone single-modality tracker");
  track_cmd->add_option("--detections", track.detections, "detections .jsonl")->required();
  track_cmd->add_option("--modality", track_modality, "camera or radar");
  track_cmd->add_option("--config", track_config, "booster config file");
  track_cmd->add_option("--out", track.out_dir, "output directory")->required();

  BoostArgs boost;
  std::string boost_calib, boost_config;
  auto * boost_cmd = app.add_subcommand("boost", "run the full fusion pipeline");
  boost_cmd->add_option("--camera", boost.camera, "camera detections .jsonl")->required();
  boost_cmd->add_option("--radar", boost.radar, "radar detections .jsonl")->required();
  boost_cmd->add_option("--calib", boost_calib, "camera calibration .json");
  boost_cmd->add_option("--config", boost_config, "booster config file");
  boost_cmd->add_option("--out", boost.out_dir, "output directory")->required();

  EvalArgs eval;
  std::string eval_slice, eval_calib, eval_out;
  auto * eval_cmd = app.add_subcommand("eval", "score tracks against ground truth");
  eval_cmd->add_option("--gt", eval.gt, "ground truth .jsonl")->required();
  eval_cmd->add_option("--tracks", eval.tracks, "tracks .jsonl")->required();
  eval_cmd->add_option("--slice", eval_slice, "distance, azimuth or occlusion");
  eval_cmd->add_option("--calib", eval_calib, "camera calibration (occlusion slicing)");
  eval_cmd->add_option("--max-distance", eval.max_distance, "BEV match gate in metres");
  eval_cmd->add_option("--out", eval_out, "write here instead of stdout");

  AblateArgs ablate;
  std::string ablate_axis = "crosscheck", ablate_config, ablate_out;
  auto * ablate_cmd = app.add_subcommand("ablate", "run an ablation sweep over the suite");
  ablate_cmd->add_option("--seed", ablate.seed, "suite seed");
  ablate_cmd->add_option("--axis", ablate_axis, "crosscheck, pairing or weighting");
  ablate_cmd->add_option("--config", ablate_config, "base booster config file");
  ablate_cmd->add_option("--out", ablate_out, "write CSV here instead of stdout");

  std::string rerun_manifest, rerun_out;
  auto * rerun_cmd = app.add_subcommand("rerun", "repeat a recorded simulate or boost run");
  rerun_cmd->add_option("--manifest", rerun_manifest, "manifest.json")->required();
  rerun_cmd->add_option("--out", rerun_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto opt_path = [](const std::string & s) -> std::optional<fs::path> {
    if (s.empty()) {
      return std::nullopt;
    }
    return fs::path(s);
  };

  return guarded(
    [&] {
      if (simulate->parsed()) {
        sim.config = opt_path(sim_config);
        if (seed_opt->count() > 0) {
          sim.seed = sim_seed;
        }
        cmd_simulate(sim);
      } else if (track_cmd->parsed()) {
        track.modality = modality_from_string(track_modality);
        track.config = opt_path(track_config);
        cmd_track(track);
      } else if (boost_cmd->parsed()) {
        boost.calib = opt_path(boost_calib);
        boost.config = opt_path(boost_config);
        cmd_boost(boost);
      } else if (eval_cmd->parsed()) {
        if (!eval_slice.empty()) {
          eval.slice = slice_axis_from_string(eval_slice);
        }
        eval.calib = opt_path(eval_calib);
        eval.out = opt_path(eval_out);
        cmd_eval(eval);
      } else if (ablate_cmd->parsed()) {
        ablate.axis = ablation_axis_from_string(ablate_axis);
        ablate.config = opt_path(ablate_config);
        ablate.out = opt_path(ablate_out);
        cmd_ablate(ablate);
      } else if (rerun_cmd->parsed()) {
        cmd_rerun(rerun_manifest, rerun_out);
      }
    },
    std::cerr);
}
