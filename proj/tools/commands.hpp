#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bytetrack/metrics.hpp"
#include "bytetrack/mot_io.hpp"
#include "bytetrack/synth.hpp"
#include "bytetrack/tracker.hpp"

namespace bytetrack::cli {

namespace fs = std::filesystem;

/// Ordered `key=value` record written next to every command's outputs.
class Manifest {
 public:
  explicit Manifest(std::string command);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long value);
  void set(const std::string& key, int value) { set(key, static_cast<long>(value)); }
  void set_config(const TrackerConfig& cfg, const std::string& prefix = "config.");

  std::optional<std::string> get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(const fs::path& path) const;
  static Manifest read(const fs::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Path of the manifest that belongs to an output file.
fs::path manifest_path_for(const fs::path& output);

/// One sequence of a corpus: `<dir>/det/det.txt`, `<dir>/gt/gt.txt`, optional
/// `<dir>/seqinfo.ini`.
struct SequencePaths {
  std::string name;
  fs::path det;
  fs::path gt;
  fs::path res;  // optional, empty when unused
  int frame_count = 0;
};

/// Every subdirectory of `dir` holding det/det.txt and gt/gt.txt, sorted by name.
std::vector<SequencePaths> discover_corpus(const fs::path& dir);

// ---------------------------------------------------------------- track

struct TrackRequest {
  fs::path det_path;
  fs::path out_path;
  std::optional<fs::path> public_det_path;
  TrackerConfig config;
  int frame_count = 0;
};

struct TrackSummary {
  TrackDump tracks;
  int frames = 0;
  std::size_t detections = 0;
  double read_ms = 0.0;
  double assoc_mean_ms = 0.0;
  double assoc_max_ms = 0.0;
  double total_ms = 0.0;
  std::vector<io::Diagnostic> warnings;
};

/// Runs the tracker over every frame and writes results plus manifest.
TrackSummary cmd_track(const TrackRequest& req);

// ---------------------------------------------------------------- eval

struct EvalRequest {
  std::vector<SequencePaths> sequences;  // gt and res used
  std::optional<fs::path> csv_path;
  EvalOptions options;
};

struct EvalReport {
  std::vector<SequenceCounts> sequences;
  EvalResult total;
};

/// Prints a human-readable table to `out`; writes the CSV when requested.
EvalReport cmd_eval(const EvalRequest& req, std::ostream& out);

void write_eval_csv(std::ostream& out, const EvalReport& report);

// ---------------------------------------------------------------- sweep

struct SweepRequest {
  std::vector<SequencePaths> sequences;  // det and gt used
  std::vector<double> taus;
  std::vector<AssociationMode> modes;
  TrackerConfig base;
  std::optional<fs::path> csv_path;
};

struct SweepRow {
  AssociationMode mode = AssociationMode::Byte;
  double tau = 0.0;
  EvalResult result;
};

struct SweepReport {
  std::vector<SweepRow> rows;                                // sorted by (mode, tau)
  std::vector<std::pair<AssociationMode, double>> spreads;  // max - min MOTA per mode
};

/// Raises tau_low below tau when needed so every tau in (0, 1) is valid.
SweepReport cmd_sweep(const SweepRequest& req, std::ostream& out);

void write_sweep_csv(std::ostream& out, const SweepReport& report);
/// max - min MOTA over the rows of one mode (rows without MOTA are skipped).
double mota_spread(const std::vector<SweepRow>& rows, AssociationMode mode);

// ---------------------------------------------------------------- low-score report

struct LowScoreRequest {
  std::vector<SequencePaths> sequences;  // det, gt and res used
  double tau_low = 0.1;
  double tau_high = 0.6;
  std::optional<fs::path> csv_path;
};

struct LowScoreRow {
  std::string sequence;
  long tp = 0;
  long fp = 0;
};

/// Result boxes whose originating detection scored in [tau_low, tau_high]
/// are split into TP (IoU >= 0.5 with a considered gt box) and FP.
std::vector<LowScoreRow> cmd_lowscore_report(const LowScoreRequest& req, std::ostream& out);

/// Per-sequence core of cmd_lowscore_report, on in-memory data.
LowScoreRow classify_low_score(std::span<const Detection> dets, std::span<const GtEntry> gt,
                               const TrackDump& results, double tau_low, double tau_high,
                               int score_precision = 2);

// ---------------------------------------------------------------- interp

struct InterpRequest {
  fs::path res_path;
  fs::path out_path;
  int sigma = 20;
};

TrackDump cmd_interp(const InterpRequest& req);

// ---------------------------------------------------------------- synth

struct SynthRequest {
  // Each entry is a preset name ("crossing", "dense") or a config file path.
  std::vector<std::string> sources;
  fs::path out_dir;
};

/// Writes `<out_dir>/<name>/{det/det.txt, gt/gt.txt, seqinfo.ini, scenario.cfg}`.
std::vector<SequencePaths> cmd_synth(const SynthRequest& req);

/// Resolves a preset name or a config path to a scenario named after it.
synth::Scenario load_scenario(const std::string& source);

}  // namespace bytetrack::cli
