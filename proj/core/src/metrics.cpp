#include "bytetrack/metrics.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "bytetrack/assignment.hpp"

namespace bytetrack {

namespace {

struct Box {
  int id;
  BBox box;
};

struct FrameData {
  std::vector<Box> gt;          // considered rows
  std::vector<Box> distractor;  // distractor rows
  std::vector<Box> pred;
};

Eigen::MatrixXd cost_between(const std::vector<Box>& a, const std::vector<Box>& b) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 - iou(a[i].box, b[j].box);
    }
  }
  return c;
}

// Builds per-frame data, removing predictions that are best explained by a
// distractor row.
std::map<int, FrameData> prepare(std::span<const GtEntry> gt, const TrackDump& pred,
                                 const EvalOptions& opts) {
  std::map<int, FrameData> frames;
  for (const GtEntry& g : gt) {
    if (g.considered) {
      frames[g.frame].gt.push_back({g.identity, g.box});
    } else if (g.distractor) {
      frames[g.frame].distractor.push_back({g.identity, g.box});
    }
  }
  for (const auto& [id, seq] : pred.tracks()) {
    for (const TrackEntry& e : seq) frames[e.frame].pred.push_back({id, e.box});
  }

  for (auto& [frame, fd] : frames) {
    auto by_id = [](const Box& a, const Box& b) { return a.id < b.id; };
    std::sort(fd.gt.begin(), fd.gt.end(), by_id);
    std::sort(fd.distractor.begin(), fd.distractor.end(), by_id);
    std::sort(fd.pred.begin(), fd.pred.end(), by_id);

    if (!opts.ignore_distractors || fd.distractor.empty() || fd.pred.empty()) continue;
    std::vector<Box> all = fd.gt;
    all.insert(all.end(), fd.distractor.begin(), fd.distractor.end());
    const Assignment a = min_cost_assignment(cost_between(all, fd.pred), opts.iou_min);
    std::vector<char> drop(fd.pred.size(), 0);
    for (const auto& [r, c] : a.matches) {
      if (static_cast<std::size_t>(r) >= fd.gt.size()) drop[c] = 1;
    }
    std::vector<Box> kept;
    for (std::size_t j = 0; j < fd.pred.size(); ++j) {
      if (!drop[j]) kept.push_back(fd.pred[j]);
    }
    fd.pred = std::move(kept);
  }
  return frames;
}

}  // namespace

bool is_distractor_class(int cls) { return cls == 2 || cls == 7 || cls == 8 || cls == 12; }

std::optional<double> ClearMotCounts::mota() const {
  if (num_gt <= 0) return std::nullopt;
  return 1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(num_gt);
}

double IdentityCounts::idf1() const {
  const long denom = 2 * idtp + idfp + idfn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(idtp) / static_cast<double>(denom);
}

ClearMotCounts clear_mot(std::span<const GtEntry> gt, const TrackDump& pred,
                         const EvalOptions& opts) {
  ClearMotCounts out;
  std::unordered_map<int, int> last_match;  // gt identity -> predicted identity

  for (const auto& [frame, fd] : prepare(gt, pred, opts)) {
    FrameTrace tr;
    tr.frame = frame;
    std::vector<char> gt_used(fd.gt.size(), 0);
    std::vector<char> pred_used(fd.pred.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    // Keep correspondences that are still valid.
    for (std::size_t i = 0; i < fd.gt.size(); ++i) {
      auto it = last_match.find(fd.gt[i].id);
      if (it == last_match.end()) continue;
      for (std::size_t j = 0; j < fd.pred.size(); ++j) {
        if (pred_used[j] || fd.pred[j].id != it->second) continue;
        if (iou(fd.gt[i].box, fd.pred[j].box) >= opts.iou_min) {
          gt_used[i] = 1;
          pred_used[j] = 1;
          pairs.emplace_back(i, j);
        }
        break;
      }
    }

    std::vector<Box> gt_rest;
    std::vector<Box> pred_rest;
    std::vector<std::size_t> gt_map;
    std::vector<std::size_t> pred_map;
    for (std::size_t i = 0; i < fd.gt.size(); ++i) {
      if (gt_used[i]) continue;
      gt_rest.push_back(fd.gt[i]);
      gt_map.push_back(i);
    }
    for (std::size_t j = 0; j < fd.pred.size(); ++j) {
      if (pred_used[j]) continue;
      pred_rest.push_back(fd.pred[j]);
      pred_map.push_back(j);
    }
    const Assignment a = min_cost_assignment(cost_between(gt_rest, pred_rest), opts.iou_min);
    for (const auto& [r, c] : a.matches) pairs.emplace_back(gt_map[r], pred_map[c]);

    for (const auto& [i, j] : pairs) {
      const int gid = fd.gt[i].id;
      const int pid = fd.pred[j].id;
      auto it = last_match.find(gid);
      if (it != last_match.end() && it->second != pid) ++tr.ids;
      last_match[gid] = pid;
      tr.matches.emplace_back(gid, pid);
    }
    std::sort(tr.matches.begin(), tr.matches.end());

    tr.fp = static_cast<int>(fd.pred.size() - pairs.size());
    tr.fn = static_cast<int>(fd.gt.size() - pairs.size());
    out.fp += tr.fp;
    out.fn += tr.fn;
    out.ids += tr.ids;
    out.num_gt += static_cast<long>(fd.gt.size());
    out.num_pred += static_cast<long>(fd.pred.size());
    out.trace.push_back(std::move(tr));
  }
  return out;
}

IdentityCounts identity_metrics(std::span<const GtEntry> gt, const TrackDump& pred,
                                const EvalOptions& opts) {
  const std::map<int, FrameData> frames = prepare(gt, pred, opts);

  std::map<int, long> gt_len;
  std::map<int, long> pred_len;
  std::map<std::pair<int, int>, long> overlap;
  for (const auto& [frame, fd] : frames) {
    for (const Box& g : fd.gt) ++gt_len[g.id];
    for (const Box& p : fd.pred) ++pred_len[p.id];
    for (const Box& g : fd.gt) {
      for (const Box& p : fd.pred) {
        if (iou(g.box, p.box) >= opts.iou_min) ++overlap[{g.id, p.id}];
      }
    }
  }

  std::vector<int> gt_ids;
  std::vector<int> pred_ids;
  std::unordered_map<int, Eigen::Index> gt_pos;
  std::unordered_map<int, Eigen::Index> pred_pos;
  for (const auto& [id, n] : gt_len) {
    gt_pos[id] = static_cast<Eigen::Index>(gt_ids.size());
    gt_ids.push_back(id);
  }
  for (const auto& [id, n] : pred_len) {
    pred_pos[id] = static_cast<Eigen::Index>(pred_ids.size());
    pred_ids.push_back(id);
  }

  long total_gt = 0;
  long total_pred = 0;
  for (const auto& [id, n] : gt_len) total_gt += n;
  for (const auto& [id, n] : pred_len) total_pred += n;

  IdentityCounts out;
  const auto ng = static_cast<Eigen::Index>(gt_ids.size());
  const auto np = static_cast<Eigen::Index>(pred_ids.size());
  if (ng > 0 && np > 0 && !overlap.empty()) {
    // Square (ng + np) problem. Rows: gt identities then FP dummies.
    // Cols: predicted identities then FN dummies. Total cost = idfn + idfp.
    const Eigen::Index n = ng + np;
    CostMatrix cm;
    cm.values = Eigen::MatrixXd::Zero(n, n);
    cm.feasible = BoolMatrix::Constant(n, n, false);
    for (const auto& [key, w] : overlap) {
      const Eigen::Index r = gt_pos[key.first];
      const Eigen::Index c = pred_pos[key.second];
      cm.values(r, c) = static_cast<double>(gt_len[key.first] + pred_len[key.second] - 2 * w);
      cm.feasible(r, c) = true;
    }
    for (Eigen::Index r = 0; r < ng; ++r) {
      cm.values(r, np + r) = static_cast<double>(gt_len[gt_ids[r]]);
      cm.feasible(r, np + r) = true;
    }
    for (Eigen::Index c = 0; c < np; ++c) {
      cm.values(ng + c, c) = static_cast<double>(pred_len[pred_ids[c]]);
      cm.feasible(ng + c, c) = true;
    }
    cm.feasible.bottomRightCorner(np, ng).setConstant(true);

    const Assignment a = min_cost_assignment(cm);
    for (const auto& [r, c] : a.matches) {
      if (r >= ng || c >= np) continue;
      const auto it = overlap.find({gt_ids[r], pred_ids[c]});
      if (it == overlap.end()) continue;
      out.idtp += it->second;
      out.pairs.emplace_back(gt_ids[r], pred_ids[c]);
    }
  }
  out.idfn = total_gt - out.idtp;
  out.idfp = total_pred - out.idtp;
  return out;
}

SequenceCounts evaluate_sequence(std::span<const GtEntry> gt, const TrackDump& pred,
                                 const EvalOptions& opts, std::string name) {
  const ClearMotCounts c = clear_mot(gt, pred, opts);
  const IdentityCounts i = identity_metrics(gt, pred, opts);
  SequenceCounts s;
  s.name = std::move(name);
  s.fp = c.fp;
  s.fn = c.fn;
  s.ids = c.ids;
  s.num_gt = c.num_gt;
  s.num_pred = c.num_pred;
  s.idtp = i.idtp;
  s.idfp = i.idfp;
  s.idfn = i.idfn;
  return s;
}

EvalResult aggregate(std::span<const SequenceCounts> sequences) {
  EvalResult r;
  for (const SequenceCounts& s : sequences) {
    r.fp += s.fp;
    r.fn += s.fn;
    r.ids += s.ids;
    r.num_gt += s.num_gt;
    r.num_pred += s.num_pred;
    r.idtp += s.idtp;
    r.idfp += s.idfp;
    r.idfn += s.idfn;
  }
  if (r.num_gt > 0) {
    r.mota = 1.0 - static_cast<double>(r.fp + r.fn + r.ids) / static_cast<double>(r.num_gt);
  }
  const long denom = 2 * r.idtp + r.idfp + r.idfn;
  r.idf1 = denom > 0 ? 2.0 * static_cast<double>(r.idtp) / static_cast<double>(denom) : 0.0;
  return r;
}

}  // namespace bytetrack
