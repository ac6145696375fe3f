#include "rstlab/relmap.hpp"

#include <sstream>

#include "rstlab/errors.hpp"
#include "rstlab/strutil.hpp"
#include "rstlab/treeops.hpp"

#ifndef RSTLAB_DATA_DIR
#define RSTLAB_DATA_DIR "data"
#endif

namespace rstlab {
namespace {

std::vector<std::vector<std::string>> read_tsv(const std::string& text, std::size_t columns,
                                               const std::string& what) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split_char(line, '\t');
    if (cols.size() != columns)
      throw Error(Errc::bad_manifest,
                  what + " line " + std::to_string(lineno) + ": expected " +
                      std::to_string(columns) + " columns, got " + std::to_string(cols.size()));
    for (auto& c : cols) c = trim(c);
    rows.push_back(std::move(cols));
  }
  return rows;
}

std::string strip_nuclearity_suffix(std::string label) {
  while (label.size() >= 2 && label[label.size() - 2] == '-') {
    const char c = label.back();
    if (c != 'e' && c != 's' && c != 'n') break;
    label.resize(label.size() - 2);
  }
  return label;
}

}  // namespace

MappingTable MappingTable::load(const std::string& mapping_path,
                                const std::string& rstdt_classes_path,
                                const std::string& alignment_path) {
  MappingTable t;
  for (auto& cols : read_tsv(read_file(mapping_path), 3, "relation mapping")) {
    MappingRow row{lower(cols[0]), cols[1], cols[2]};
    if (!t.by_gum_relation_.emplace(row.gum_relation, row).second)
      throw Error(Errc::bad_manifest, "duplicate mapping source " + row.gum_relation);
    t.rows_.push_back(std::move(row));
  }
  for (auto& cols : read_tsv(read_file(rstdt_classes_path), 2, "class table"))
    if (!t.rstdt_fine_to_class_.emplace(lower(cols[0]), cols[1]).second)
      throw Error(Errc::bad_manifest, "duplicate fine relation " + cols[0]);
  for (auto& cols : read_tsv(read_file(alignment_path), 2, "class alignment"))
    if (!t.alignment_.emplace(cols[0], cols[1]).second)
      throw Error(Errc::bad_manifest, "duplicate alignment source " + cols[0]);
  for (const auto& row : t.rows_)
    if (!t.alignment_.count(row.gum_class))
      throw Error(Errc::bad_manifest, "gum class without alignment: " + row.gum_class);
  return t;
}

MappingTable MappingTable::builtin(const std::string& dir) {
  const std::string base = dir.empty() ? RSTLAB_DATA_DIR : dir;
  return load(base + "/relation_mapping.tsv", base + "/rstdt_classes.tsv",
              base + "/class_alignment.tsv");
}

std::string MappingTable::to_class(const std::string& label, Scheme scheme) const {
  const std::string key = lower(trim(label));
  if (key == kRootLabel) return kRootLabel;
  if (scheme == Scheme::gum) {
    auto it = by_gum_relation_.find(key);
    if (it == by_gum_relation_.end()) throw Error(Errc::unknown_label, label);
    return it->second.gum_class;
  }
  auto it = rstdt_fine_to_class_.find(strip_nuclearity_suffix(key));
  if (it == rstdt_fine_to_class_.end()) throw Error(Errc::unknown_label, label);
  return it->second;
}

std::string MappingTable::gum_to_rstdt(const std::string& gum_relation) const {
  auto it = by_gum_relation_.find(lower(trim(gum_relation)));
  if (it == by_gum_relation_.end()) throw Error(Errc::unknown_label, gum_relation);
  return it->second.rstdt_class;
}

bool MappingTable::diverges(const std::string& gum_relation) const {
  auto it = by_gum_relation_.find(lower(trim(gum_relation)));
  if (it == by_gum_relation_.end()) throw Error(Errc::unknown_label, gum_relation);
  return alignment_.at(it->second.gum_class) != it->second.rstdt_class;
}

namespace {

void count_divergent(const NaryNode& node, const MappingTable& table, long long& divergent,
                     long long& total) {
  if (node.is_leaf()) return;
  if (node.kind == NodeKind::multinuc) {
    const std::string& label = node.children.front().label;
    if (!is_same_unit_label(label)) {
      const long long k = static_cast<long long>(node.children.size()) - 1;
      total += k;
      if (table.diverges(label)) divergent += k;
    }
  } else {
    for (const auto& c : node.children) {
      if (c.role != Role::satellite || is_same_unit_label(c.label)) continue;
      ++total;
      if (table.diverges(c.label)) ++divergent;
    }
  }
  for (const auto& c : node.children) count_divergent(c, table, divergent, total);
}

}  // namespace

double mapping_mismatch_rate(const std::vector<const ConstituentTree*>& docs,
                             const MappingTable& table) {
  long long divergent = 0, total = 0;
  for (const auto* d : docs) count_divergent(d->root, table, divergent, total);
  if (total == 0) return 0.0;
  return static_cast<double>(divergent) / static_cast<double>(total);
}

std::uint64_t MappingTable::checksum() const {
  std::string canon;
  for (const auto& r : rows_)
    canon += r.gum_relation + '\t' + r.gum_class + '\t' + r.rstdt_class + '\n';
  return fnv1a(canon);
}

Collapse collapse_from(const std::string& name) {
  if (name == "none") return Collapse::none;
  if (name == "gum-classes") return Collapse::gum_classes;
  if (name == "rstdt-classes") return Collapse::rstdt_classes;
  if (name == "gum-to-rstdt") return Collapse::gum_to_rstdt;
  throw Error(Errc::bad_manifest, "unknown collapse mode \"" + name + "\"");
}

const char* collapse_name(Collapse c) {
  switch (c) {
    case Collapse::none: return "none";
    case Collapse::gum_classes: return "gum-classes";
    case Collapse::rstdt_classes: return "rstdt-classes";
    case Collapse::gum_to_rstdt: return "gum-to-rstdt";
  }
  return "?";
}

namespace {

void collapse_node(NaryNode& node, const NaryNode* parent, const MappingTable& table,
                   Collapse mode, RelationInventory& inventory) {
  const bool relation_edge =
      parent && (node.role == Role::satellite ||
                 (parent->kind == NodeKind::multinuc && node.role == Role::nucleus));
  if (relation_edge) {
    switch (mode) {
      case Collapse::none: break;
      case Collapse::gum_classes: node.label = table.to_class(node.label, Scheme::gum); break;
      case Collapse::rstdt_classes: node.label = table.to_class(node.label, Scheme::rstdt); break;
      case Collapse::gum_to_rstdt: node.label = table.gum_to_rstdt(node.label); break;
    }
    inventory.add(node.label, node.role == Role::satellite ? RelKind::rst : RelKind::multinuc);
  }
  for (auto& c : node.children) collapse_node(c, &node, table, mode, inventory);
}

// Collapsing can give a nested multinuc the same relation as its multinuc
// parent; splice such children flat so the tree stays in normal form. A
// multinuc child's edge label is the parent's relation, so the test is
// edge label against the child's own relation.
void flatten_multinucs(NaryNode& node) {
  for (auto& c : node.children) flatten_multinucs(c);
  if (node.kind != NodeKind::multinuc) return;
  std::vector<NaryNode> merged;
  for (auto& c : node.children) {
    if (c.kind == NodeKind::multinuc && !c.children.empty() &&
        c.children.front().label == c.label) {
      for (auto& gc : c.children) merged.push_back(std::move(gc));
    } else {
      merged.push_back(std::move(c));
    }
  }
  node.children = std::move(merged);
}

}  // namespace

ConstituentTree collapse_tree(const ConstituentTree& tree, const MappingTable& table,
                              Collapse mode) {
  ConstituentTree out = tree;
  out.inventory = {};
  collapse_node(out.root, nullptr, table, mode, out.inventory);
  flatten_multinucs(out.root);
  return out;
}

}  // namespace rstlab
