#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bytetrack/postprocess.hpp"

namespace bytetrack::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_double(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string format_mota(const std::optional<double>& m) {
  return m ? format_double(*m) : std::string("nan");
}

void report_warnings(const std::vector<io::Diagnostic>& warnings, const fs::path& source) {
  for (const io::Diagnostic& w : warnings) {
    std::cerr << "warning: " << source.string() << ':' << w.line << ": " << w.message << '\n';
  }
}

std::vector<Detection> load_detections(const fs::path& path) {
  io::Parsed<Detection> p = io::read_detections(path);
  report_warnings(p.warnings, path);
  return std::move(p.records);
}

std::vector<GtEntry> load_gt(const fs::path& path) {
  io::Parsed<GtEntry> p = io::read_gt(path);
  report_warnings(p.warnings, path);
  return std::move(p.records);
}

TrackDump load_results(const fs::path& path) {
  std::vector<io::Diagnostic> warnings;
  TrackDump dump = io::read_results(path, &warnings);
  report_warnings(warnings, path);
  return dump;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::string join_paths(const std::vector<SequencePaths>& seqs, fs::path SequencePaths::*field) {
  std::string out;
  for (const SequencePaths& s : seqs) {
    if ((s.*field).empty()) continue;
    if (!out.empty()) out += ';';
    out += (s.*field).string();
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- manifest

Manifest::Manifest(std::string command) { set("command", std::move(command)); }

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set(const std::string& key, long value) { set(key, std::to_string(value)); }

void Manifest::set_config(const TrackerConfig& cfg, const std::string& prefix) {
  set(prefix + "tau_high", cfg.tau_high);
  set(prefix + "tau_low", cfg.tau_low);
  set(prefix + "min_iou_first", cfg.min_iou_first);
  set(prefix + "min_iou_second", cfg.min_iou_second);
  set(prefix + "lost_ttl", cfg.lost_ttl);
  set(prefix + "mode", std::string(to_string(cfg.mode)));
  set(prefix + "second_stage_tracked_only",
      std::string(cfg.second_stage_tracked_only ? "true" : "false"));
  set(prefix + "init_score_margin", cfg.init_score_margin);
  set(prefix + "emit_on_birth", std::string(cfg.emit_on_birth ? "true" : "false"));
  set(prefix + "public_min_iou", cfg.public_min_iou);
  set(prefix + "kalman.pos_weight", cfg.kalman.pos_weight);
  set(prefix + "kalman.vel_weight", cfg.kalman.vel_weight);
}

std::optional<std::string> Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Manifest::write(const fs::path& path) const {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  if (!out) throw std::runtime_error("failed writing manifest '" + path.string() + "'");
}

Manifest Manifest::read(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest '" + path.string() + "'");
  Manifest m("");
  m.entries_.clear();
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    m.entries_.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

fs::path manifest_path_for(const fs::path& output) {
  fs::path p = output;
  p += ".manifest";
  return p;
}

std::vector<SequencePaths> discover_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("corpus directory '" + dir.string() + "' does not exist");
  }
  std::vector<SequencePaths> out;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (!e.is_directory()) continue;
    SequencePaths s;
    s.name = e.path().filename().string();
    s.det = e.path() / "det" / "det.txt";
    s.gt = e.path() / "gt" / "gt.txt";
    if (!fs::exists(s.det) || !fs::exists(s.gt)) continue;
    s.frame_count = io::read_seqinfo_length(e.path() / "seqinfo.ini").value_or(0);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const SequencePaths& a, const SequencePaths& b) { return a.name < b.name; });
  return out;
}

// ---------------------------------------------------------------- track

TrackSummary cmd_track(const TrackRequest& req) {
  const auto t0 = Clock::now();
  TrackSummary summary;

  const auto t_read = Clock::now();
  io::Parsed<Detection> parsed = io::read_detections(req.det_path);
  std::vector<Detection> public_dets;
  if (req.public_det_path) public_dets = load_detections(*req.public_det_path);
  summary.read_ms = ms_since(t_read);
  summary.warnings = std::move(parsed.warnings);
  report_warnings(summary.warnings, req.det_path);
  summary.detections = parsed.records.size();

  const auto frames = group_by_frame(parsed.records, req.frame_count);
  const auto public_frames = group_by_frame(public_dets, static_cast<int>(frames.size()));
  ByteTracker tracker(req.config);
  double assoc_sum = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const int frame = static_cast<int>(k + 1);
    const auto t_step = Clock::now();
    FrameResult r = req.public_det_path
                        ? tracker.step(frame, frames[k], public_frames[k])
                        : tracker.step(frame, frames[k]);
    const double dt = ms_since(t_step);
    assoc_sum += dt;
    summary.assoc_max_ms = std::max(summary.assoc_max_ms, dt);
    append(summary.tracks, r);
  }
  summary.frames = static_cast<int>(frames.size());
  summary.assoc_mean_ms = frames.empty() ? 0.0 : assoc_sum / static_cast<double>(frames.size());

  ensure_parent(req.out_path);
  io::write_results(req.out_path, summary.tracks);
  summary.total_ms = ms_since(t0);

  Manifest m("track");
  m.set_config(req.config);
  m.set("input.det", req.det_path.string());
  if (req.public_det_path) m.set("input.public_det", req.public_det_path->string());
  m.set("output.results", req.out_path.string());
  m.set("frames", summary.frames);
  m.set("detections", static_cast<long>(summary.detections));
  m.set("identities", static_cast<long>(summary.tracks.identity_count()));
  m.set("result_boxes", static_cast<long>(summary.tracks.box_count()));
  m.set("timing.detection_read_ms", summary.read_ms);
  m.set("timing.association_mean_ms", summary.assoc_mean_ms);
  m.set("timing.association_max_ms", summary.assoc_max_ms);
  m.set("timing.total_ms", summary.total_ms);
  m.write(manifest_path_for(req.out_path));
  return summary;
}

// ---------------------------------------------------------------- eval

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  out << "#schema=bytetrack.eval.v1\n";
  out << "sequence,mota,idf1,fp,fn,ids,num_gt,num_pred,idtp,idfp,idfn\n";
  auto row = [&out](const std::string& name, const EvalResult& r) {
    out << name << ',' << format_mota(r.mota) << ',' << format_double(r.idf1) << ',' << r.fp
        << ',' << r.fn << ',' << r.ids << ',' << r.num_gt << ',' << r.num_pred << ',' << r.idtp
        << ',' << r.idfp << ',' << r.idfn << '\n';
  };
  for (const SequenceCounts& s : report.sequences) {
    const SequenceCounts one[] = {s};
    row(s.name, aggregate(one));
  }
  row("OVERALL", report.total);
}

EvalReport cmd_eval(const EvalRequest& req, std::ostream& out) {
  EvalReport report;
  for (const SequencePaths& s : req.sequences) {
    const std::vector<GtEntry> gt = load_gt(s.gt);
    const TrackDump res = load_results(s.res);
    report.sequences.push_back(evaluate_sequence(gt, res, req.options, s.name));
  }
  report.total = aggregate(report.sequences);

  out << std::left << std::setw(20) << "sequence" << std::right << std::setw(10) << "MOTA"
      << std::setw(10) << "IDF1" << std::setw(8) << "FP" << std::setw(8) << "FN" << std::setw(7)
      << "IDs" << std::setw(8) << "GT" << '\n';
  auto line = [&out](const std::string& name, const EvalResult& r) {
    out << std::left << std::setw(20) << name << std::right << std::setw(10)
        << (r.mota ? format_double(*r.mota * 100.0, 2) : std::string("n/a")) << std::setw(10)
        << format_double(r.idf1 * 100.0, 2) << std::setw(8) << r.fp << std::setw(8) << r.fn
        << std::setw(7) << r.ids << std::setw(8) << r.num_gt << '\n';
  };
  for (const SequenceCounts& s : report.sequences) {
    const SequenceCounts one[] = {s};
    line(s.name, aggregate(one));
  }
  line("OVERALL", report.total);

  if (req.csv_path) {
    ensure_parent(*req.csv_path);
    std::ofstream csv(*req.csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write '" + req.csv_path->string() + "'");
    write_eval_csv(csv, report);

    Manifest m("eval");
    m.set("input.gt", join_paths(req.sequences, &SequencePaths::gt));
    m.set("input.res", join_paths(req.sequences, &SequencePaths::res));
    m.set("output.csv", req.csv_path->string());
    m.set("iou_min", req.options.iou_min);
    m.set("ignore_distractors", std::string(req.options.ignore_distractors ? "true" : "false"));
    m.set("mota", format_mota(report.total.mota));
    m.set("idf1", report.total.idf1);
    m.write(manifest_path_for(*req.csv_path));
  }
  return report;
}

// ---------------------------------------------------------------- sweep

double mota_spread(const std::vector<SweepRow>& rows, AssociationMode mode) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const SweepRow& r : rows) {
    if (r.mode != mode || !r.result.mota) continue;
    lo = std::min(lo, *r.result.mota);
    hi = std::max(hi, *r.result.mota);
  }
  return hi >= lo ? hi - lo : 0.0;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "#schema=bytetrack.sweep.v1\n";
  out << "mode,tau_high,mota,idf1,ids,fp,fn,num_gt\n";
  for (const SweepRow& r : report.rows) {
    out << to_string(r.mode) << ',' << format_double(r.tau, 2) << ',' << format_mota(r.result.mota)
        << ',' << format_double(r.result.idf1) << ',' << r.result.ids << ',' << r.result.fp << ','
        << r.result.fn << ',' << r.result.num_gt << '\n';
  }
}

SweepReport cmd_sweep(const SweepRequest& req, std::ostream& out) {
  for (double tau : req.taus) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw std::invalid_argument("sweep: tau values must lie in (0, 1), got " +
                                  format_double(tau, 4));
    }
  }
  struct Loaded {
    std::string name;
    std::vector<Detection> dets;
    std::vector<GtEntry> gt;
    int frames;
  };
  std::vector<Loaded> seqs;
  for (const SequencePaths& s : req.sequences) {
    seqs.push_back({s.name, load_detections(s.det), load_gt(s.gt), s.frame_count});
  }

  std::vector<AssociationMode> modes = req.modes;
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  std::vector<double> taus = req.taus;
  std::sort(taus.begin(), taus.end());

  SweepReport report;
  for (AssociationMode mode : modes) {
    for (double tau : taus) {
      TrackerConfig cfg = req.base;
      cfg.mode = mode;
      cfg.tau_high = tau;
      cfg.tau_low = std::min(cfg.tau_low, tau / 2.0);
      std::vector<SequenceCounts> counts;
      for (const Loaded& s : seqs) {
        const TrackDump dump = track_sequence(s.dets, cfg, s.frames);
        counts.push_back(evaluate_sequence(s.gt, dump, {}, s.name));
      }
      report.rows.push_back({mode, tau, aggregate(counts)});
    }
    report.spreads.emplace_back(mode, mota_spread(report.rows, mode));
  }

  for (const SweepRow& r : report.rows) {
    out << to_string(r.mode) << " tau=" << format_double(r.tau, 2)
        << " MOTA=" << format_mota(r.result.mota) << " IDF1=" << format_double(r.result.idf1)
        << " IDs=" << r.result.ids << '\n';
  }
  for (const auto& [mode, spread] : report.spreads) {
    out << "spread " << to_string(mode) << " MOTA max-min=" << format_double(spread) << '\n';
  }

  if (req.csv_path) {
    ensure_parent(*req.csv_path);
    std::ofstream csv(*req.csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write '" + req.csv_path->string() + "'");
    write_sweep_csv(csv, report);

    Manifest m("sweep");
    m.set_config(req.base, "base.");
    m.set("input.det", join_paths(req.sequences, &SequencePaths::det));
    m.set("input.gt", join_paths(req.sequences, &SequencePaths::gt));
    m.set("output.csv", req.csv_path->string());
    for (const auto& [mode, spread] : report.spreads) {
      m.set(std::string("spread.") + to_string(mode), spread);
    }
    m.write(manifest_path_for(*req.csv_path));
  }
  return report;
}

// ---------------------------------------------------------------- low-score report

LowScoreRow classify_low_score(std::span<const Detection> dets, std::span<const GtEntry> gt,
                               const TrackDump& results, double tau_low, double tau_high,
                               int score_precision) {
  LowScoreRow row;
  if (!(tau_low < tau_high)) return row;

  std::map<int, std::vector<const Detection*>> dets_by_frame;
  for (const Detection& d : dets) dets_by_frame[d.frame].push_back(&d);
  std::map<int, std::vector<const GtEntry*>> gt_by_frame;
  for (const GtEntry& g : gt) {
    if (g.considered) gt_by_frame[g.frame].push_back(&g);
  }
  const double score_tol = 0.5 * std::pow(10.0, -score_precision) + 1e-9;

  for (const auto& [id, seq] : results.tracks()) {
    for (const TrackEntry& e : seq) {
      if (e.interpolated) continue;
      const auto it = dets_by_frame.find(e.frame);
      if (it == dets_by_frame.end()) continue;

      // The originating detection carries the score written with the result;
      // among those, the one overlapping the result box most.
      const Detection* origin = nullptr;
      double best = 0.0;
      for (int pass = 0; pass < 2 && origin == nullptr; ++pass) {
        for (const Detection* d : it->second) {
          if (pass == 0 && std::abs(d->score - e.score) > score_tol) continue;
          const double o = iou(d->box, e.box);
          if (o > best) {
            best = o;
            origin = d;
          }
        }
      }
      if (origin == nullptr || origin->score < tau_low || origin->score > tau_high) continue;

      bool hit = false;
      if (const auto g = gt_by_frame.find(e.frame); g != gt_by_frame.end()) {
        for (const GtEntry* entry : g->second) {
          if (iou(entry->box, e.box) >= 0.5) {
            hit = true;
            break;
          }
        }
      }
      ++(hit ? row.tp : row.fp);
    }
  }
  return row;
}

std::vector<LowScoreRow> cmd_lowscore_report(const LowScoreRequest& req, std::ostream& out) {
  std::vector<LowScoreRow> rows;
  for (const SequencePaths& s : req.sequences) {
    const std::vector<Detection> dets = load_detections(s.det);
    const std::vector<GtEntry> gt = load_gt(s.gt);
    const TrackDump res = load_results(s.res);
    LowScoreRow row = classify_low_score(dets, gt, res, req.tau_low, req.tau_high);
    row.sequence = s.name;
    out << s.name << " low-score boxes: TP=" << row.tp << " FP=" << row.fp << '\n';
    rows.push_back(std::move(row));
  }

  if (req.csv_path) {
    ensure_parent(*req.csv_path);
    std::ofstream csv(*req.csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write '" + req.csv_path->string() + "'");
    csv << "#schema=bytetrack.lowscore.v1\n";
    csv << "sequence,tp,fp\n";
    for (const LowScoreRow& r : rows) csv << r.sequence << ',' << r.tp << ',' << r.fp << '\n';

    Manifest m("lowscore");
    m.set("input.det", join_paths(req.sequences, &SequencePaths::det));
    m.set("input.gt", join_paths(req.sequences, &SequencePaths::gt));
    m.set("input.res", join_paths(req.sequences, &SequencePaths::res));
    m.set("tau_low", req.tau_low);
    m.set("tau_high", req.tau_high);
    m.set("output.csv", req.csv_path->string());
    m.write(manifest_path_for(*req.csv_path));
  }
  return rows;
}

// ---------------------------------------------------------------- interp

TrackDump cmd_interp(const InterpRequest& req) {
  const auto t0 = Clock::now();
  const TrackDump in = load_results(req.res_path);
  TrackDump out = interpolate(in, InterpConfig{req.sigma});
  ensure_parent(req.out_path);
  io::write_results(req.out_path, out);

  Manifest m("interp");
  m.set("input.results", req.res_path.string());
  m.set("output.results", req.out_path.string());
  m.set("sigma", req.sigma);
  m.set("boxes_in", static_cast<long>(in.box_count()));
  m.set("boxes_out", static_cast<long>(out.box_count()));
  m.set("timing.total_ms", ms_since(t0));
  m.write(manifest_path_for(req.out_path));
  return out;
}

// ---------------------------------------------------------------- synth

synth::Scenario load_scenario(const std::string& source) {
  if (fs::is_regular_file(source)) {
    synth::Scenario s;
    s.config = synth::read_config(source);
    s.name = fs::path(source).stem().string();
    return s;
  }
  return synth::preset(source);
}

std::vector<SequencePaths> cmd_synth(const SynthRequest& req) {
  std::vector<SequencePaths> out;
  for (const std::string& source : req.sources) {
    const synth::Scenario scenario = load_scenario(source);
    const synth::SyntheticSequence seq = synth::generate(scenario);

    const fs::path dir = req.out_dir / scenario.name;
    fs::create_directories(dir / "det");
    fs::create_directories(dir / "gt");
    SequencePaths paths;
    paths.name = scenario.name;
    paths.det = dir / "det" / "det.txt";
    paths.gt = dir / "gt" / "gt.txt";
    paths.frame_count = scenario.config.frames;
    io::write_detections(paths.det, seq.dets);
    io::write_gt(paths.gt, seq.gt);
    io::write_seqinfo(dir / "seqinfo.ini", scenario.name, scenario.config.frames,
                      static_cast<int>(scenario.config.field_width),
                      static_cast<int>(scenario.config.field_height));
    {
      std::ofstream cfg(dir / "scenario.cfg", std::ios::binary | std::ios::trunc);
      cfg << "# synthetic scenario '" << scenario.name << "'\n" << synth::to_key_value(scenario.config);
      if (!cfg) throw std::runtime_error("cannot write scenario.cfg in '" + dir.string() + "'");
    }

    Manifest m("synth");
    m.set("input.source", source);
    m.set("prng", std::string(synth::kPrngId));
    m.set("output.det", paths.det.string());
    m.set("output.gt", paths.gt.string());
    m.set("frames", scenario.config.frames);
    m.set("detections", static_cast<long>(seq.dets.size()));
    m.set("gt_boxes", static_cast<long>(seq.gt.size()));
    m.write(dir / "manifest.txt");
    out.push_back(std::move(paths));
  }
  return out;
}

}  // namespace bytetrack::cli
