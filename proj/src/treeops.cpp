#include "rstlab/treeops.hpp"

#include <set>

#include "rstlab/errors.hpp"
#include "rstlab/strutil.hpp"

namespace rstlab {
namespace {

BinaryNode bin_node(const NaryNode& node, bool left_branching);

// Attaches satellites around an already-binarized nucleus, nearest the
// nucleus span first; a left satellite binds inside a right one at equal
// distance.
BinaryNode attach_satellites(BinaryNode acc, std::vector<const NaryNode*> sats,
                             bool left_branching) {
  const int nuc_first = acc.first, nuc_last = acc.last;
  while (!sats.empty()) {
    std::size_t pick = sats.size();
    bool on_left = false;
    int best = 0;
    for (std::size_t i = 0; i < sats.size(); ++i) {
      int distance;
      bool left;
      if (sats[i]->last < nuc_first) {
        distance = nuc_first - sats[i]->last;
        left = true;
      } else if (sats[i]->first > nuc_last) {
        distance = sats[i]->first - nuc_last;
        left = false;
      } else {
        throw Error(Errc::non_projective_span, "satellite overlaps its nucleus");
      }
      if (pick == sats.size() || distance < best || (distance == best && left && !on_left)) {
        pick = i;
        best = distance;
        on_left = left;
      }
    }
    const NaryNode* sat = sats[pick];
    if (on_left ? sat->last != acc.first - 1 : sat->first != acc.last + 1)
      throw Error(Errc::non_projective_span, "satellite not adjacent to its nucleus");
    sats.erase(sats.begin() + static_cast<std::ptrdiff_t>(pick));
    BinaryNode satb = bin_node(*sat, left_branching);
    if (on_left)
      acc = make_binary_node(Category::SN, sat->label, std::move(satb), std::move(acc));
    else
      acc = make_binary_node(Category::NS, sat->label, std::move(acc), std::move(satb));
  }
  return acc;
}

BinaryNode bin_node(const NaryNode& node, bool left_branching) {
  if (node.is_leaf()) return make_binary_leaf(node.edu);
  if (node.kind == NodeKind::multinuc) {
    const std::string& label = node.children.front().label;
    if (left_branching) {
      BinaryNode acc = bin_node(node.children.front(), left_branching);
      for (std::size_t i = 1; i < node.children.size(); ++i)
        acc = make_binary_node(Category::NN, label, std::move(acc),
                               bin_node(node.children[i], left_branching));
      return acc;
    }
    BinaryNode acc = bin_node(node.children.back(), left_branching);
    for (std::size_t i = node.children.size() - 1; i-- > 0;)
      acc = make_binary_node(Category::NN, label, bin_node(node.children[i], left_branching),
                             std::move(acc));
    return acc;
  }
  const NaryNode* nucleus = nullptr;
  std::vector<const NaryNode*> sats;
  for (const auto& c : node.children) {
    if (c.role == Role::nucleus) {
      if (nucleus)
        throw Error(Errc::malformed_xml, "span node with two nuclei at EDU " +
                                             std::to_string(node.first));
      nucleus = &c;
    } else {
      sats.push_back(&c);
    }
  }
  if (!nucleus)
    throw Error(Errc::malformed_xml, "span node without a nucleus at EDU " +
                                         std::to_string(node.first));
  return attach_satellites(bin_node(*nucleus, left_branching), std::move(sats), left_branching);
}

NaryNode debin_node(const BinaryNode& node) {
  NaryNode out;
  if (node.leaf) {
    out.kind = NodeKind::leaf;
    out.edu = node.edu;
    out.first = out.last = node.edu;
    return out;
  }
  if (node.cat == Category::NN) {
    out.kind = NodeKind::multinuc;
    for (const BinaryNode* side : {&node.left(), &node.right()}) {
      NaryNode child = debin_node(*side);
      if (child.kind == NodeKind::multinuc && !side->leaf && side->cat == Category::NN &&
          side->label == node.label) {
        for (auto& g : child.children) out.children.push_back(std::move(g));
      } else {
        child.role = Role::nucleus;
        child.label = node.label;
        out.children.push_back(std::move(child));
      }
    }
    out.first = out.children.front().first;
    out.last = out.children.back().last;
    return out;
  }
  out.kind = NodeKind::span;
  NaryNode left = debin_node(node.left());
  NaryNode right = debin_node(node.right());
  if (node.cat == Category::NS) {
    left.role = Role::nucleus;
    left.label = kSpanLabel;
    right.role = Role::satellite;
    right.label = node.label;
  } else {
    left.role = Role::satellite;
    left.label = node.label;
    right.role = Role::nucleus;
    right.label = kSpanLabel;
  }
  out.children.push_back(std::move(left));
  out.children.push_back(std::move(right));
  out.first = out.children.front().first;
  out.last = out.children.back().last;
  return out;
}

}  // namespace

BinaryTree binarize(const ConstituentTree& tree, const BinarizeOptions& opts) {
  BinaryTree out;
  out.doc_id = tree.doc_id;
  out.genre = tree.genre;
  out.edus = tree.edus;
  out.inventory = tree.inventory;
  out.root = bin_node(tree.root, opts.left_branching);
  return out;
}

ConstituentTree debinarize(const BinaryTree& btree) {
  ConstituentTree out;
  out.doc_id = btree.doc_id;
  out.genre = btree.genre;
  out.edus = btree.edus;
  out.inventory = btree.inventory;
  out.root = debin_node(btree.root);
  out.root.role = Role::nucleus;
  out.root.label = kRootLabel;
  return out;
}

bool is_same_unit_label(const std::string& label) { return lower(label) == kSameUnitLabel; }

namespace {

void count_instances(const NaryNode& node, long long& ns, long long& sn, long long& nn,
                     long long& same_unit, std::set<std::string>* labels) {
  if (node.is_leaf()) return;
  if (node.kind == NodeKind::multinuc) {
    const std::string& label = node.children.front().label;
    const long long k = static_cast<long long>(node.children.size()) - 1;
    if (is_same_unit_label(label))
      same_unit += k;
    else
      nn += k;
    if (labels) labels->insert(label);
  } else {
    const NaryNode* nucleus = nullptr;
    for (const auto& c : node.children)
      if (c.role == Role::nucleus) nucleus = &c;
    for (const auto& c : node.children) {
      if (c.role != Role::satellite) continue;
      if (labels) labels->insert(c.label);
      if (is_same_unit_label(c.label))
        ++same_unit;
      else if (nucleus && c.last < nucleus->first)
        ++sn;  // satellite left of its nucleus
      else
        ++ns;
    }
  }
  for (const auto& c : node.children) count_instances(c, ns, sn, nn, same_unit, labels);
}

}  // namespace

NuclearityDistribution nuclearity_distribution(const std::vector<const ConstituentTree*>& docs) {
  long long ns = 0, sn = 0, nn = 0, same_unit = 0;
  for (const auto* d : docs) count_instances(d->root, ns, sn, nn, same_unit, nullptr);
  const long long total = ns + sn + nn;
  if (total == 0) throw Error(Errc::empty_corpus, "no relation instances");
  NuclearityDistribution out;
  out.ns = static_cast<double>(ns) / static_cast<double>(total);
  out.sn = static_cast<double>(sn) / static_cast<double>(total);
  out.nn = static_cast<double>(nn) / static_cast<double>(total);
  out.instances = total;
  return out;
}

CorpusStats corpus_stats(const std::vector<const ConstituentTree*>& docs) {
  CorpusStats out;
  std::set<std::string> labels;
  long long ns = 0, sn = 0, nn = 0, same_unit = 0;
  for (const auto* d : docs) {
    ++out.docs;
    out.edus += static_cast<int>(d->edus.size());
    for (const auto& e : d->edus) out.tokens += static_cast<long long>(count_tokens(e.text));
    count_instances(d->root, ns, sn, nn, same_unit, &labels);
  }
  out.relation_instances = static_cast<int>(ns + sn + nn);
  out.same_unit_instances = static_cast<int>(same_unit);
  out.label_count = static_cast<int>(labels.size());
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) { return corpus_stats(corpus.select()); }

}  // namespace rstlab
