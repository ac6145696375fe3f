#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rstlab/tree.hpp"

namespace rstlab {

struct ScoreTriple {
  double s = 0, n = 0, r = 0;  // micro F1 percentages
};

struct ParsevalCounts {
  long long matched_s = 0, matched_n = 0, matched_r = 0;
  long long gold_units = 0, pred_units = 0;

  ParsevalCounts& operator+=(const ParsevalCounts& o) {
    matched_s += o.matched_s;
    matched_n += o.matched_n;
    matched_r += o.matched_r;
    gold_units += o.gold_units;
    pred_units += o.pred_units;
    return *this;
  }
};

struct ParsevalOptions {
  // The whole-document span always matches under gold segmentation and is
  // excluded from the unit sets unless requested.
  bool include_root = false;
  // Applied to unit labels before the R comparison; identity when unset.
  // Wire a coarse-class collapse here for class-level scoring.
  std::function<std::string(const std::string&)> relabel;
};

// Original-Parseval counts over the internal nodes of two binary trees.
// S matches on span, N on span plus nuclearity category, R on span,
// category, and (relabeled) relation label. Throws LeafMismatch when the
// trees cover different EDU counts.
ParsevalCounts parseval(const BinaryTree& gold, const BinaryTree& pred,
                        const ParsevalOptions& opts = {});

// F1 triple from pooled counts. Documents with no units on either side
// score 100 by convention (nothing to get wrong).
ScoreTriple triple_from(const ParsevalCounts& c);

enum class AggregateMode { micro, macro_by_genre };

struct DocScore {
  std::string doc_id;
  std::string genre;
  ParsevalCounts counts;
};

// micro pools counts over all documents; macro_by_genre pools per genre and
// averages the genre triples unweighted.
ScoreTriple aggregate(const std::vector<DocScore>& docs, AggregateMode mode);

struct SegScore {
  double p = 0, r = 0, f1 = 0;
};

struct SegCounts {
  long long matched = 0, gold = 0, pred = 0;

  SegCounts& operator+=(const SegCounts& o) {
    matched += o.matched;
    gold += o.gold;
    pred += o.pred;
    return *this;
  }
};

// Boundary tokens are 0-based token indices that begin an EDU, excluding
// index 0. Token totals must agree between the two segmentations.
SegCounts seg_counts(long long gold_tokens, long long pred_tokens,
                     const std::vector<long long>& gold_bounds,
                     const std::vector<long long>& pred_bounds);

SegScore seg_score(const SegCounts& c);

// Derives (boundaries, token total) from a document split into EDU strings.
std::pair<std::vector<long long>, long long> edu_boundaries(const std::vector<std::string>& edus);

}  // namespace rstlab
