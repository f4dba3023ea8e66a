#include "bytetrack/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <tuple>

namespace bytetrack::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Advances to the next non-blank line; false at end of input.
  bool next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      std::string_view v = trim(raw);
      if (line_ == 1 && v.starts_with("\xEF\xBB\xBF")) v.remove_prefix(3);
      if (v.empty()) continue;
      current_ = std::string(v);
      fields_ = split_fields(current_);
      return true;
    }
    return false;
  }

  std::size_t size() const { return fields_.size(); }
  int line() const { return line_; }

  double number(std::size_t i) const {
    const std::string_view f = fields_.at(i);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
      fail("field " + std::to_string(i + 1) + " is not a number: '" + std::string(f) + "'");
    }
    return v;
  }

  int integer(std::size_t i) const {
    const double v = number(i);
    if (v != std::floor(v) || std::abs(v) > 2e9) {
      fail("field " + std::to_string(i + 1) + " is not an integer: '" +
           std::string(fields_.at(i)) + "'");
    }
    return static_cast<int>(v);
  }

  void require_fields(std::size_t lo, std::size_t hi) const {
    if (size() < lo || size() > hi) {
      fail("expected " + std::to_string(lo) + (lo == hi ? "" : "-" + std::to_string(hi)) +
           " comma-separated fields, got " + std::to_string(size()));
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source_, line_, msg); }

 private:
  std::istream& in_;
  std::string source_;
  int line_ = 0;
  std::string current_;
  std::vector<std::string_view> fields_;
};

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file for reading");
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// Fixed-point formatting without a "-0.00" artifact.
std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::optional<BBox> checked_box(const LineReader& r, std::vector<Diagnostic>& warnings,
                                std::size_t first) {
  const double l = r.number(first);
  const double t = r.number(first + 1);
  const double w = r.number(first + 2);
  const double h = r.number(first + 3);
  if (!(w > 0.0) || !(h > 0.0)) {
    warnings.push_back({r.line(), "non-positive box size (w=" + fixed(w, 2) + ", h=" +
                                      fixed(h, 2) + "); row skipped"});
    return std::nullopt;
  }
  return BBox(l, t, w, h);
}

int checked_frame(const LineReader& r) {
  const int f = r.integer(0);
  if (f < 1) r.fail("frame number must be >= 1, got " + std::to_string(f));
  return f;
}

}  // namespace

ParseError::ParseError(std::string source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " + message),
      source_(std::move(source)),
      line_(line) {}

Parsed<Detection> parse_detections(std::istream& in, const std::string& source) {
  Parsed<Detection> out;
  LineReader r(in, source);
  while (r.next()) {
    r.require_fields(7, 10);
    Detection d;
    d.frame = checked_frame(r);
    const std::optional<BBox> box = checked_box(r, out.warnings, 2);
    double score = r.number(6);
    for (std::size_t i = 7; i < r.size(); ++i) r.number(i);
    if (!box) continue;
    if (score < 0.0 || score > 1.0) {
      out.warnings.push_back({r.line(), "confidence " + fixed(score, 4) + " clamped to [0, 1]"});
      score = std::clamp(score, 0.0, 1.0);
    }
    d.box = *box;
    d.score = score;
    out.records.push_back(d);
  }
  return out;
}

Parsed<Detection> read_detections(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  return parse_detections(in, path.string());
}

Parsed<GtEntry> parse_gt(std::istream& in, const std::string& source) {
  Parsed<GtEntry> out;
  LineReader r(in, source);
  while (r.next()) {
    r.require_fields(6, 10);
    GtEntry g;
    g.frame = checked_frame(r);
    g.identity = r.integer(1);
    const std::optional<BBox> box = checked_box(r, out.warnings, 2);
    for (std::size_t i = 6; i < r.size(); ++i) r.number(i);
    if (!box) continue;
    g.box = *box;
    if (r.size() >= 8) {
      const int flag = r.integer(6);
      g.cls = r.integer(7);
      g.considered = flag == 1 && g.cls == kPedestrianClass;
      g.distractor = is_distractor_class(g.cls);
      if (r.size() >= 9) g.visibility = r.number(8);
    } else {
      g.considered = true;
      g.cls = kPedestrianClass;
    }
    out.records.push_back(g);
  }
  return out;
}

Parsed<GtEntry> read_gt(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  return parse_gt(in, path.string());
}

Parsed<TrackEntry> parse_results(std::istream& in, TrackDump& out, const std::string& source) {
  Parsed<TrackEntry> parsed;
  LineReader r(in, source);
  while (r.next()) {
    r.require_fields(6, 10);
    TrackEntry e;
    e.frame = checked_frame(r);
    const int id = r.integer(1);
    const std::optional<BBox> box = checked_box(r, parsed.warnings, 2);
    e.score = r.size() >= 7 ? r.number(6) : 1.0;
    for (std::size_t i = 7; i < r.size(); ++i) r.number(i);
    if (!box) continue;
    e.box = *box;
    try {
      out.add(id, e);
    } catch (const std::invalid_argument&) {
      r.fail("duplicate entry for identity " + std::to_string(id) + " at frame " +
             std::to_string(e.frame));
    }
    parsed.records.push_back(e);
  }
  return parsed;
}

TrackDump read_results(const std::filesystem::path& path, std::vector<Diagnostic>* warnings) {
  std::ifstream in = open_for_read(path);
  TrackDump dump;
  Parsed<TrackEntry> p = parse_results(in, dump, path.string());
  if (warnings) *warnings = std::move(p.warnings);
  return dump;
}

void write_results(std::ostream& out, const TrackDump& tracks, int precision) {
  std::vector<std::tuple<int, int, const TrackEntry*>> rows;
  rows.reserve(tracks.box_count());
  for (const auto& [id, seq] : tracks.tracks()) {
    for (const TrackEntry& e : seq) rows.emplace_back(e.frame, id, &e);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  for (const auto& [frame, id, e] : rows) {
    out << frame << ',' << id << ',' << fixed(e->box.left(), precision) << ','
        << fixed(e->box.top(), precision) << ',' << fixed(e->box.width(), precision) << ','
        << fixed(e->box.height(), precision) << ',' << fixed(e->score, precision)
        << ",-1,-1,-1\n";
  }
}

void write_results(const std::filesystem::path& path, const TrackDump& tracks, int precision) {
  std::ofstream out = open_for_write(path);
  write_results(out, tracks, precision);
  finish_write(out, path);
}

void write_detections(std::ostream& out, std::span<const Detection> dets, int precision) {
  std::vector<const Detection*> rows;
  rows.reserve(dets.size());
  for (const Detection& d : dets) rows.push_back(&d);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Detection* a, const Detection* b) { return a->frame < b->frame; });
  for (const Detection* d : rows) {
    out << d->frame << ",-1," << fixed(d->box.left(), precision) << ','
        << fixed(d->box.top(), precision) << ',' << fixed(d->box.width(), precision) << ','
        << fixed(d->box.height(), precision) << ',' << fixed(d->score, precision)
        << ",-1,-1,-1\n";
  }
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> dets,
                      int precision) {
  std::ofstream out = open_for_write(path);
  write_detections(out, dets, precision);
  finish_write(out, path);
}

void write_gt(std::ostream& out, std::span<const GtEntry> gt, int precision) {
  std::vector<const GtEntry*> rows;
  rows.reserve(gt.size());
  for (const GtEntry& g : gt) rows.push_back(&g);
  std::stable_sort(rows.begin(), rows.end(), [](const GtEntry* a, const GtEntry* b) {
    return std::tie(a->frame, a->identity) < std::tie(b->frame, b->identity);
  });
  for (const GtEntry* g : rows) {
    out << g->frame << ',' << g->identity << ',' << fixed(g->box.left(), precision) << ','
        << fixed(g->box.top(), precision) << ',' << fixed(g->box.width(), precision) << ','
        << fixed(g->box.height(), precision) << ',' << (g->considered ? 1 : 0) << ',' << g->cls
        << ',' << fixed(g->visibility, precision) << '\n';
  }
}

void write_gt(const std::filesystem::path& path, std::span<const GtEntry> gt, int precision) {
  std::ofstream out = open_for_write(path);
  write_gt(out, gt, precision);
  finish_write(out, path);
}

std::optional<int> read_seqinfo_length(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view v = trim(line);
    const std::size_t eq = v.find('=');
    if (eq == std::string_view::npos || trim(v.substr(0, eq)) != "seqLength") continue;
    const std::string_view num = trim(v.substr(eq + 1));
    int n = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
    if (ec == std::errc() && ptr == num.data() + num.size() && n >= 0) return n;
    return std::nullopt;
  }
  return std::nullopt;
}

void write_seqinfo(const std::filesystem::path& path, const std::string& name, int frames,
                   int width, int height) {
  std::ofstream out = open_for_write(path);
  out << "[Sequence]\n"
      << "name=" << name << '\n'
      << "frameRate=30\n"
      << "seqLength=" << frames << '\n'
      << "imWidth=" << width << '\n'
      << "imHeight=" << height << '\n';
  finish_write(out, path);
}

}  // namespace bytetrack::io
