#pragma once

#include <string>
#include <vector>

#include "rstlab/corpus.hpp"
#include "rstlab/tree.hpp"

namespace rstlab {

struct BinarizeOptions {
  // Multinuclear chains branch to the right unless this is set.
  bool left_branching = false;
};

// Multinuclear nodes with k > 2 children become chains of k-1 NN nodes
// sharing the label; a nucleus with several satellites attaches them
// closest-first (left satellite innermost on distance ties). Leaf order and
// labels are preserved.
BinaryTree binarize(const ConstituentTree& tree, const BinarizeOptions& opts = {});

// Merges adjacent NN chains with identical labels back into one
// multinuclear node. debinarize(binarize(t)) == t for trees in normal form.
ConstituentTree debinarize(const BinaryTree& btree);

bool is_same_unit_label(const std::string& label);

struct NuclearityDistribution {
  double ns = 0, sn = 0, nn = 0;  // proportions, sum to 1
  long long instances = 0;
};

// Proportions over relation instances of the n-ary trees: satellite
// attachments counted by direction, multinuclear nodes as k-1 NN instances.
// same-unit attachments are excluded.
NuclearityDistribution nuclearity_distribution(const std::vector<const ConstituentTree*>& docs);

struct CorpusStats {
  int docs = 0;
  long long tokens = 0;
  int edus = 0;
  int relation_instances = 0;  // non-span attachments, same-unit excluded
  int same_unit_instances = 0;
  int label_count = 0;  // distinct relation labels in use, same-unit included
};

CorpusStats corpus_stats(const std::vector<const ConstituentTree*>& docs);
CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace rstlab
