#include "rstlab/depconv.hpp"

#include "rstlab/errors.hpp"
#include "rstlab/treeops.hpp"

namespace rstlab {
namespace {

int head_of(const NaryNode& node) {
  if (node.is_leaf()) return node.edu;
  if (node.kind == NodeKind::multinuc) return head_of(node.children.front());
  for (const auto& c : node.children)
    if (c.role == Role::nucleus) return head_of(c);
  throw Error(Errc::malformed_xml, "node without a nucleus at EDU " + std::to_string(node.first));
}

void assign_arcs(const NaryNode& node, DepDocument& doc) {
  if (node.is_leaf()) return;
  if (node.kind == NodeKind::multinuc) {
    const int h0 = head_of(node.children.front());
    for (std::size_t i = 1; i < node.children.size(); ++i) {
      const int h = head_of(node.children[i]);
      doc.heads[h - 1] = h0;
      doc.labels[h - 1] = node.children[i].label;
    }
  } else {
    int nucleus_head = 0;
    for (const auto& c : node.children)
      if (c.role == Role::nucleus) nucleus_head = head_of(c);
    for (const auto& c : node.children) {
      if (c.role != Role::satellite) continue;
      const int h = head_of(c);
      doc.heads[h - 1] = nucleus_head;
      doc.labels[h - 1] = c.label;
    }
  }
  for (const auto& c : node.children) assign_arcs(c, doc);
}

}  // namespace

DepDocument to_dependencies(const ConstituentTree& tree) {
  DepDocument doc;
  doc.doc_id = tree.doc_id;
  doc.genre = tree.genre;
  doc.edus = tree.edus;
  doc.heads.assign(tree.edus.size(), 0);
  doc.labels.assign(tree.edus.size(), kRootLabel);
  assign_arcs(tree.root, doc);
  validate(doc);
  return doc;
}

DepDocument to_dependencies(const BinaryTree& btree) {
  return to_dependencies(debinarize(btree));
}

int cdu(const DepDocument& doc) {
  for (int i = 0; i < doc.size(); ++i)
    if (doc.heads[i] == 0) return i + 1;
  throw Error(Errc::no_root, doc.doc_id);
}

}  // namespace rstlab
