#include "rstlab/tree.hpp"

#include "rstlab/errors.hpp"
#include "rstlab/strutil.hpp"

namespace rstlab {

const char* category_name(Category c) {
  switch (c) {
    case Category::NS: return "NS";
    case Category::SN: return "SN";
    case Category::NN: return "NN";
  }
  return "?";
}

BinaryNode make_binary_leaf(int edu) {
  BinaryNode n;
  n.leaf = true;
  n.edu = edu;
  n.first = n.last = edu;
  return n;
}

BinaryNode make_binary_node(Category cat, std::string label, BinaryNode left, BinaryNode right) {
  BinaryNode n;
  n.leaf = false;
  n.cat = cat;
  n.label = std::move(label);
  n.first = left.first;
  n.last = right.last;
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}

void assign_spans(NaryNode& node) {
  if (node.is_leaf()) {
    node.first = node.last = node.edu;
    return;
  }
  for (auto& c : node.children) assign_spans(c);
  node.first = node.children.front().first;
  node.last = node.children.back().last;
}

void assign_spans(BinaryNode& node) {
  if (node.leaf) {
    node.first = node.last = node.edu;
    return;
  }
  for (auto& c : node.children) assign_spans(c);
  node.first = node.children.front().first;
  node.last = node.children.back().last;
}

int leaf_count(const NaryNode& node) {
  if (node.is_leaf()) return 1;
  int n = 0;
  for (const auto& c : node.children) n += leaf_count(c);
  return n;
}

int leaf_count(const BinaryNode& node) {
  if (node.leaf) return 1;
  int n = 0;
  for (const auto& c : node.children) n += leaf_count(c);
  return n;
}

int internal_count(const BinaryNode& node) {
  if (node.leaf) return 0;
  int n = 1;
  for (const auto& c : node.children) n += internal_count(c);
  return n;
}

bool structurally_equal(const NaryNode& a, const NaryNode& b) {
  if (a.kind != b.kind || a.role != b.role || a.label != b.label) return false;
  if (a.first != b.first || a.last != b.last) return false;
  if (a.is_leaf()) return a.edu == b.edu;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  return true;
}

static bool edus_equal(const std::vector<Edu>& a, const std::vector<Edu>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].index != b[i].index || a[i].text != b[i].text) return false;
  return true;
}

bool structurally_equal(const ConstituentTree& a, const ConstituentTree& b) {
  return edus_equal(a.edus, b.edus) && structurally_equal(a.root, b.root);
}

bool structurally_equal(const BinaryNode& a, const BinaryNode& b) {
  if (a.leaf != b.leaf || a.first != b.first || a.last != b.last) return false;
  if (a.leaf) return a.edu == b.edu;
  if (a.cat != b.cat || a.label != b.label) return false;
  for (std::size_t i = 0; i < 2; ++i)
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  return true;
}

bool structurally_equal(const BinaryTree& a, const BinaryTree& b) {
  return edus_equal(a.edus, b.edus) && structurally_equal(a.root, b.root);
}

static void validate_node(const NaryNode& node, const ConstituentTree& tree, bool is_root,
                          int& next_leaf) {
  if (node.is_leaf()) {
    ++next_leaf;
    if (node.edu != next_leaf)
      throw Error(Errc::non_projective_span,
                  tree.doc_id + ": leaf order broken at EDU " + std::to_string(node.edu));
    return;
  }
  if (node.children.size() < 2)
    throw Error(Errc::malformed_xml, tree.doc_id + ": internal node with < 2 children");
  if (node.kind == NodeKind::span && node.children.size() != 2)
    throw Error(Errc::malformed_xml, tree.doc_id + ": span node must pair nucleus and satellite");

  int nuclei = 0;
  std::string multinuc_label;
  for (const auto& c : node.children) {
    if (c.role == Role::nucleus) ++nuclei;
    if (node.kind == NodeKind::multinuc) {
      if (c.role != Role::nucleus)
        throw Error(Errc::malformed_xml, tree.doc_id + ": satellite child of a multinuc node");
      if (multinuc_label.empty()) multinuc_label = c.label;
      if (c.label != multinuc_label)
        throw Error(Errc::malformed_xml, tree.doc_id + ": mixed labels under a multinuc node");
      if (!tree.inventory.empty() && !tree.inventory.has(c.label, RelKind::multinuc))
        throw Error(Errc::unknown_relation, tree.doc_id + ": " + c.label);
    } else {
      if (c.role == Role::satellite) {
        if (!tree.inventory.empty() && !tree.inventory.has(c.label, RelKind::rst))
          throw Error(Errc::unknown_relation, tree.doc_id + ": " + c.label);
      } else if (c.label != kSpanLabel) {
        throw Error(Errc::malformed_xml,
                    tree.doc_id + ": nucleus under a span node must carry \"span\"");
      }
    }
  }
  if (nuclei < 1)
    throw Error(Errc::malformed_xml, tree.doc_id + ": node without a nucleus child");
  if (node.kind == NodeKind::span && nuclei != 1)
    throw Error(Errc::malformed_xml, tree.doc_id + ": span node needs exactly one nucleus");
  if (node.kind == NodeKind::multinuc && nuclei < 2)
    throw Error(Errc::malformed_xml, tree.doc_id + ": multinuc node with a single nucleus");

  int at = node.first;
  for (const auto& c : node.children) {
    if (c.first != at)
      throw Error(Errc::non_projective_span,
                  tree.doc_id + ": gap or overlap at EDU " + std::to_string(at));
    validate_node(c, tree, false, next_leaf);
    at = c.last + 1;
  }
  if (at != node.last + 1)
    throw Error(Errc::non_projective_span, tree.doc_id + ": span does not cover its children");
  (void)is_root;
}

void validate(const ConstituentTree& tree) {
  const int n = static_cast<int>(tree.edus.size());
  if (n == 0) throw Error(Errc::malformed_xml, tree.doc_id + ": no EDUs");
  for (int i = 0; i < n; ++i) {
    if (tree.edus[i].index != i + 1)
      throw Error(Errc::malformed_xml, tree.doc_id + ": EDU indices not contiguous");
    if (trim(tree.edus[i].text).empty())
      throw Error(Errc::empty_segment, tree.doc_id + ": EDU " + std::to_string(i + 1));
  }
  if (tree.root.first != 1 || tree.root.last != n)
    throw Error(Errc::non_projective_span, tree.doc_id + ": root does not span the document");
  int next_leaf = 0;
  validate_node(tree.root, tree, true, next_leaf);
  if (next_leaf != n)
    throw Error(Errc::non_projective_span, tree.doc_id + ": leaf count mismatch");
}

}  // namespace rstlab
