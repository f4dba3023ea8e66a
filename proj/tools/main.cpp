// bytetrack command-line front end.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace bytetrack;
using namespace bytetrack::cli;

void add_tracker_flags(CLI::App& app, TrackerConfig& cfg, std::string& mode, double& min_iou) {
  app.add_option("--tau-high", cfg.tau_high, "High-score threshold")->capture_default_str();
  app.add_option("--tau-low", cfg.tau_low, "Low-score floor")->capture_default_str();
  app.add_option("--min-iou", min_iou, "IoU below which a match is rejected (both stages)")
      ->capture_default_str();
  app.add_option("--min-iou-first", cfg.min_iou_first, "Override --min-iou for the first stage");
  app.add_option("--min-iou-second", cfg.min_iou_second,
                 "Override --min-iou for the second stage");
  app.add_option("--lost-ttl", cfg.lost_ttl, "Frames a lost track is kept")->capture_default_str();
  app.add_option("--mode", mode, "Association mode: byte | single")->capture_default_str();
  app.add_flag("--second-stage-tracked-only", cfg.second_stage_tracked_only,
               "Exclude lost tracks from the second association");
  app.add_option("--init-score-margin", cfg.init_score_margin,
                 "Extra score above tau-high required to start a track");
  app.add_flag("!--no-emit-on-birth", cfg.emit_on_birth, "Hide tracks in their first frame");
}

// Applies --mode and --min-iou after parsing; explicit per-stage values win.
void finish_tracker_flags(const CLI::App& app, TrackerConfig& cfg, const std::string& mode,
                          double min_iou) {
  const auto parsed = parse_mode(mode);
  if (!parsed) throw CLI::ValidationError("--mode", "expected 'byte' or 'single', got " + mode);
  cfg.mode = *parsed;
  if (app.count("--min-iou-first") == 0) cfg.min_iou_first = min_iou;
  if (app.count("--min-iou-second") == 0) cfg.min_iou_second = min_iou;
  cfg.validate();
}

std::vector<SequencePaths> pair_sequences(const std::vector<std::string>& dets,
                                          const std::vector<std::string>& gts,
                                          const std::vector<std::string>& results) {
  const std::size_t n = std::max({dets.size(), gts.size(), results.size()});
  auto check = [n](const std::vector<std::string>& v, const char* flag) {
    if (!v.empty() && v.size() != n) {
      throw CLI::ValidationError(flag, "must be given once per sequence");
    }
  };
  check(dets, "--det");
  check(gts, "--gt");
  check(results, "--res");
  std::vector<SequencePaths> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    SequencePaths& s = out[i];
    if (!dets.empty()) s.det = dets[i];
    if (!gts.empty()) s.gt = gts[i];
    if (!results.empty()) s.res = results[i];
    const fs::path& ref = !s.gt.empty() ? s.gt : (!s.det.empty() ? s.det : s.res);
    // MOT layout <seq>/gt/gt.txt: name the sequence after <seq>.
    const std::string dir = ref.parent_path().filename().string();
    s.name = (dir == "gt" || dir == "det") ? ref.parent_path().parent_path().filename().string()
                                           : ref.stem().string();
    if (s.name.empty()) s.name = "seq" + std::to_string(i + 1);
    if (!s.det.empty() && s.det.has_parent_path()) {
      s.frame_count =
          io::read_seqinfo_length(s.det.parent_path().parent_path() / "seqinfo.ini").value_or(0);
    }
  }
  return out;
}

std::vector<double> parse_taus(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--taus", "not a number: " + item);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bytetrack: two-stage IoU association tracking, evaluation and synthesis"};
  app.require_subcommand(1);

  const TrackerConfig defaults;

  // track
  TrackRequest track_req;
  std::string track_det, track_out, track_public, track_mode = to_string(defaults.mode);
  double track_min_iou = defaults.min_iou_first;
  CLI::App* track = app.add_subcommand("track", "Run the tracker over a detection file");
  track->add_option("--det", track_det, "MOT detection file")->required();
  track->add_option("--out", track_out, "Result file to write")->required();
  track->add_option("--public-det", track_public, "Public detections gating track birth");
  track->add_option("--frames", track_req.frame_count, "Sequence length (default: last det frame)");
  add_tracker_flags(*track, track_req.config, track_mode, track_min_iou);

  // eval
  std::vector<std::string> eval_gt, eval_res;
  std::string eval_csv;
  EvalRequest eval_req;
  CLI::App* eval = app.add_subcommand("eval", "Score result files against ground truth");
  eval->add_option("--gt", eval_gt, "Ground-truth file (repeat per sequence)")->required();
  eval->add_option("--res", eval_res, "Result file (repeat per sequence)")->required();
  eval->add_option("--csv", eval_csv, "Write per-sequence CSV here");
  eval->add_option("--iou", eval_req.options.iou_min, "Match threshold")->capture_default_str();
  eval->add_flag("!--keep-distractor-matches", eval_req.options.ignore_distractors,
                 "Count predictions on distractor rows as false positives");

  // sweep
  std::vector<std::string> sweep_det, sweep_gt;
  std::string sweep_corpus, sweep_csv, sweep_taus = "0.2,0.3,0.4,0.5,0.6,0.7,0.8";
  std::vector<std::string> sweep_modes{"byte", "single"};
  SweepRequest sweep_req;
  std::string sweep_mode_unused = "byte";
  double sweep_min_iou = defaults.min_iou_first;
  CLI::App* sweep = app.add_subcommand("sweep", "MOTA/IDF1 over a range of tau-high values");
  sweep->add_option("--det", sweep_det, "Detection file (repeat per sequence)");
  sweep->add_option("--gt", sweep_gt, "Ground-truth file (repeat per sequence)");
  sweep->add_option("--corpus", sweep_corpus, "Directory of <seq>/det/det.txt + <seq>/gt/gt.txt");
  sweep->add_option("--taus", sweep_taus, "Comma-separated tau-high values")->capture_default_str();
  sweep->add_option("--modes", sweep_modes, "Modes to compare")->capture_default_str();
  sweep->add_option("--csv", sweep_csv, "Write the sweep CSV here");
  add_tracker_flags(*sweep, sweep_req.base, sweep_mode_unused, sweep_min_iou);

  // lowscore
  std::vector<std::string> low_det, low_gt, low_res;
  std::string low_csv;
  LowScoreRequest low_req;
  CLI::App* low = app.add_subcommand("lowscore", "TP/FP split of tracked low-score boxes");
  low->add_option("--det", low_det, "Detection file (repeat per sequence)")->required();
  low->add_option("--gt", low_gt, "Ground-truth file (repeat per sequence)")->required();
  low->add_option("--res", low_res, "Result file (repeat per sequence)")->required();
  low->add_option("--tau-low", low_req.tau_low, "Band lower bound")->capture_default_str();
  low->add_option("--tau-high", low_req.tau_high, "Band upper bound")->capture_default_str();
  low->add_option("--csv", low_csv, "Write the report CSV here");

  // interp
  InterpRequest interp_req;
  std::string interp_in, interp_out;
  CLI::App* interp = app.add_subcommand("interp", "Fill short gaps in result tracks");
  interp->add_option("--res", interp_in, "Result file to read")->required();
  interp->add_option("--out", interp_out, "Result file to write")->required();
  interp->add_option("--sigma", interp_req.sigma, "Largest gap to fill")->capture_default_str();

  // synth
  SynthRequest synth_req;
  std::vector<std::string> synth_sources;
  std::string synth_out;
  CLI::App* syn = app.add_subcommand("synth", "Generate synthetic gt and detections");
  syn->add_option("source", synth_sources, "Preset name (crossing, dense) or config file")
      ->required();
  syn->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);

    if (*track) {
      finish_tracker_flags(*track, track_req.config, track_mode, track_min_iou);
      track_req.det_path = track_det;
      track_req.out_path = track_out;
      if (!track_public.empty()) track_req.public_det_path = fs::path(track_public);
      const TrackSummary s = cmd_track(track_req);
      std::cout << "tracked " << s.frames << " frames, " << s.tracks.identity_count()
                << " identities, mean association " << s.assoc_mean_ms << " ms/frame\n";
    } else if (*eval) {
      eval_req.sequences = pair_sequences({}, eval_gt, eval_res);
      if (!eval_csv.empty()) eval_req.csv_path = fs::path(eval_csv);
      cmd_eval(eval_req, std::cout);
    } else if (*sweep) {
      finish_tracker_flags(*sweep, sweep_req.base, sweep_mode_unused, sweep_min_iou);
      sweep_req.sequences = sweep_corpus.empty() ? pair_sequences(sweep_det, sweep_gt, {})
                                                 : discover_corpus(sweep_corpus);
      if (sweep_req.sequences.empty()) {
        throw CLI::ValidationError("sweep", "no sequences given (--det/--gt or --corpus)");
      }
      sweep_req.taus = parse_taus(sweep_taus);
      for (const std::string& m : sweep_modes) {
        const auto mode = parse_mode(m);
        if (!mode) throw CLI::ValidationError("--modes", "unknown mode " + m);
        sweep_req.modes.push_back(*mode);
      }
      if (!sweep_csv.empty()) sweep_req.csv_path = fs::path(sweep_csv);
      cmd_sweep(sweep_req, std::cout);
    } else if (*low) {
      low_req.sequences = pair_sequences(low_det, low_gt, low_res);
      if (!low_csv.empty()) low_req.csv_path = fs::path(low_csv);
      cmd_lowscore_report(low_req, std::cout);
    } else if (*interp) {
      interp_req.res_path = interp_in;
      interp_req.out_path = interp_out;
      const TrackDump out = cmd_interp(interp_req);
      std::cout << "wrote " << out.box_count() << " boxes\n";
    } else if (*syn) {
      synth_req.sources = synth_sources;
      synth_req.out_dir = synth_out;
      for (const SequencePaths& p : cmd_synth(synth_req)) {
        std::cout << p.name << ": " << p.det.string() << ", " << p.gt.string() << '\n';
      }
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
