#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bytetrack/geometry.hpp"
#include "bytetrack/metrics.hpp"
#include "bytetrack/track_dump.hpp"

namespace bytetrack::io {

/// Fatal parse problem (bad field count, non-numeric field, unreadable file).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, int line, const std::string& message);

  const std::string& source() const { return source_; }
  /// 1-based; 0 when the error is not tied to a line.
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

/// Non-fatal problem: the line was skipped or a value was adjusted.
struct Diagnostic {
  int line = 0;
  std::string message;
};

template <typename T>
struct Parsed {
  std::vector<T> records;
  std::vector<Diagnostic> warnings;
};

/// `frame,id,bb_left,bb_top,bb_width,bb_height,conf[,x,y,z]`. The id field
/// is ignored; conf outside [0, 1] is clamped with a warning; rows with a
/// non-positive size are skipped with a warning. Blank lines are ignored.
Parsed<Detection> parse_detections(std::istream& in, const std::string& source = "<stream>");
Parsed<Detection> read_detections(const std::filesystem::path& path);

/// `frame,id,left,top,w,h[,flag[,class[,visibility]]]`. Rows with 6 or 7
/// columns are considered unconditionally; with 8+ columns a row is
/// considered iff flag == 1 and class is pedestrian.
Parsed<GtEntry> parse_gt(std::istream& in, const std::string& source = "<stream>");
Parsed<GtEntry> read_gt(const std::filesystem::path& path);

/// Result rows: `frame,id,left,top,w,h,score[,...]`.
Parsed<TrackEntry> parse_results(std::istream& in, TrackDump& out,
                                 const std::string& source = "<stream>");
TrackDump read_results(const std::filesystem::path& path,
                       std::vector<Diagnostic>* warnings = nullptr);

/// Emits `frame,id,left,top,w,h,score,-1,-1,-1` sorted by (frame, id) with
/// `precision` decimals for coordinates and score.
void write_results(std::ostream& out, const TrackDump& tracks, int precision = 2);
void write_results(const std::filesystem::path& path, const TrackDump& tracks, int precision = 2);

void write_detections(std::ostream& out, std::span<const Detection> dets, int precision = 2);
void write_detections(const std::filesystem::path& path, std::span<const Detection> dets,
                      int precision = 2);

/// Nine-column MOT17 gt rows: flag = considered, class and visibility as stored.
void write_gt(std::ostream& out, std::span<const GtEntry> gt, int precision = 2);
void write_gt(const std::filesystem::path& path, std::span<const GtEntry> gt, int precision = 2);

/// Reads `seqLength` from a seqinfo.ini, if present.
std::optional<int> read_seqinfo_length(const std::filesystem::path& path);
void write_seqinfo(const std::filesystem::path& path, const std::string& name, int frames,
                   int width, int height);

}  // namespace bytetrack::io
