#include "rstlab/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "rstlab/errors.hpp"
#include "rstlab/strutil.hpp"

namespace rstlab {
namespace {

struct Unit {
  Category cat;
  std::string label;
};

void collect_units(const BinaryNode& node, bool include_root, bool at_root,
                   const std::function<std::string(const std::string&)>& relabel,
                   std::map<std::pair<int, int>, Unit>& units) {
  if (node.leaf) return;
  if (!at_root || include_root) {
    Unit u{node.cat, relabel ? relabel(node.label) : node.label};
    units.emplace(std::make_pair(node.first, node.last), std::move(u));
  }
  for (const auto& c : node.children) collect_units(c, include_root, false, relabel, units);
}

double f1_percent(long long matched, long long gold, long long pred) {
  if (gold == 0 && pred == 0) return 100.0;
  if (matched == 0) return 0.0;
  const double p = static_cast<double>(matched) / static_cast<double>(pred);
  const double r = static_cast<double>(matched) / static_cast<double>(gold);
  return 100.0 * 2.0 * p * r / (p + r);
}

}  // namespace

ParsevalCounts parseval(const BinaryTree& gold, const BinaryTree& pred,
                        const ParsevalOptions& opts) {
  if (gold.edus.size() != pred.edus.size())
    throw Error(Errc::leaf_mismatch, gold.doc_id + ": " + std::to_string(gold.edus.size()) +
                                         " vs " + std::to_string(pred.edus.size()) + " EDUs");
  std::map<std::pair<int, int>, Unit> gold_units, pred_units;
  collect_units(gold.root, opts.include_root, true, opts.relabel, gold_units);
  collect_units(pred.root, opts.include_root, true, opts.relabel, pred_units);

  ParsevalCounts c;
  c.gold_units = static_cast<long long>(gold_units.size());
  c.pred_units = static_cast<long long>(pred_units.size());
  for (const auto& [span, gu] : gold_units) {
    auto it = pred_units.find(span);
    if (it == pred_units.end()) continue;
    ++c.matched_s;
    if (gu.cat != it->second.cat) continue;
    ++c.matched_n;
    if (gu.label == it->second.label) ++c.matched_r;
  }
  return c;
}

ScoreTriple triple_from(const ParsevalCounts& c) {
  ScoreTriple t;
  t.s = f1_percent(c.matched_s, c.gold_units, c.pred_units);
  t.n = f1_percent(c.matched_n, c.gold_units, c.pred_units);
  t.r = f1_percent(c.matched_r, c.gold_units, c.pred_units);
  return t;
}

ScoreTriple aggregate(const std::vector<DocScore>& docs, AggregateMode mode) {
  if (docs.empty()) throw Error(Errc::empty_input, "no documents to aggregate");
  if (mode == AggregateMode::micro) {
    ParsevalCounts pooled;
    for (const auto& d : docs) pooled += d.counts;
    return triple_from(pooled);
  }
  std::map<std::string, ParsevalCounts> by_genre;
  for (const auto& d : docs) by_genre[d.genre] += d.counts;
  ScoreTriple mean;
  for (const auto& [genre, counts] : by_genre) {
    const ScoreTriple t = triple_from(counts);
    mean.s += t.s;
    mean.n += t.n;
    mean.r += t.r;
  }
  const double k = static_cast<double>(by_genre.size());
  mean.s /= k;
  mean.n /= k;
  mean.r /= k;
  return mean;
}

SegCounts seg_counts(long long gold_tokens, long long pred_tokens,
                     const std::vector<long long>& gold_bounds,
                     const std::vector<long long>& pred_bounds) {
  if (gold_tokens != pred_tokens)
    throw Error(Errc::token_count_mismatch,
                std::to_string(gold_tokens) + " vs " + std::to_string(pred_tokens) + " tokens");
  auto check = [&](const std::vector<long long>& bounds) {
    for (long long b : bounds)
      if (b < 1 || b >= gold_tokens)
        throw Error(Errc::bad_edu_index, "boundary " + std::to_string(b) + " outside 1.." +
                                             std::to_string(gold_tokens - 1));
  };
  check(gold_bounds);
  check(pred_bounds);
  std::set<long long> gold_set(gold_bounds.begin(), gold_bounds.end());
  std::set<long long> pred_set(pred_bounds.begin(), pred_bounds.end());
  SegCounts c;
  c.gold = static_cast<long long>(gold_set.size());
  c.pred = static_cast<long long>(pred_set.size());
  for (long long b : pred_set)
    if (gold_set.count(b)) ++c.matched;
  return c;
}

SegScore seg_score(const SegCounts& c) {
  SegScore s;
  if (c.gold == 0 && c.pred == 0) {
    s.p = s.r = s.f1 = 100.0;
    return s;
  }
  s.p = c.pred ? 100.0 * static_cast<double>(c.matched) / static_cast<double>(c.pred) : 0.0;
  s.r = c.gold ? 100.0 * static_cast<double>(c.matched) / static_cast<double>(c.gold) : 0.0;
  s.f1 = (s.p + s.r > 0) ? 2.0 * s.p * s.r / (s.p + s.r) : 0.0;
  return s;
}

std::pair<std::vector<long long>, long long> edu_boundaries(const std::vector<std::string>& edus) {
  std::vector<long long> bounds;
  long long at = 0;
  for (std::size_t i = 0; i < edus.size(); ++i) {
    if (i > 0) bounds.push_back(at);
    at += static_cast<long long>(count_tokens(edus[i]));
  }
  return {std::move(bounds), at};
}

}  // namespace rstlab
