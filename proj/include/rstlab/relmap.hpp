#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rstlab/tree.hpp"

namespace rstlab {

enum class Scheme { gum, rstdt };

struct MappingRow {
  std::string gum_relation;
  std::string gum_class;
  std::string rstdt_class;
};

// Coarse-class collapsing for both corpora plus the GUM->RST-DT relation
// mapping, backed by three tab-separated data files (see data/).
class MappingTable {
 public:
  static MappingTable load(const std::string& mapping_path, const std::string& rstdt_classes_path,
                           const std::string& alignment_path);
  // Loads the files shipped with the build (or from `dir` when given).
  static MappingTable builtin(const std::string& dir = "");

  // Collapses a relation label to its coarse class. RST-DT labels are
  // lowercased and stripped of -e/-s/-n nuclearity suffixes first; "root"
  // maps to itself under both schemes. Unknown labels throw; no defaults.
  std::string to_class(const std::string& label, Scheme scheme) const;

  // Column 3 of the mapping table for a GUM relation.
  std::string gum_to_rstdt(const std::string& gum_relation) const;

  // True when the mapped RST-DT class differs from the identity alignment
  // of the relation's GUM class.
  bool diverges(const std::string& gum_relation) const;

  const std::vector<MappingRow>& rows() const { return rows_; }
  const std::map<std::string, std::string>& alignment() const { return alignment_; }

  int size() const { return static_cast<int>(rows_.size()); }
  // FNV-1a over the rows in file order, "gum\tclass\trstdt\n" each; pins
  // the shipped table against silent edits.
  std::uint64_t checksum() const;

 private:
  std::vector<MappingRow> rows_;
  std::map<std::string, MappingRow> by_gum_relation_;
  std::map<std::string, std::string> rstdt_fine_to_class_;
  std::map<std::string, std::string> alignment_;  // gum class -> rstdt class
};

// Fraction of relation instances (same-unit excluded) carrying a divergent
// relation, over the documents' n-ary trees.
double mapping_mismatch_rate(const std::vector<const ConstituentTree*>& docs,
                             const MappingTable& table);

enum class Collapse {
  none,
  gum_classes,    // GUM relation -> GUM class
  rstdt_classes,  // RST-DT fine relation -> RST-DT class
  gum_to_rstdt,   // GUM relation -> corresponding RST-DT class
};

Collapse collapse_from(const std::string& name);
const char* collapse_name(Collapse c);

// Rewrites every relation edge label (satellite and multinuclear edges;
// "span" and "root" pass through) and rebuilds the inventory from the
// labels actually in use.
ConstituentTree collapse_tree(const ConstituentTree& tree, const MappingTable& table, Collapse mode);

}  // namespace rstlab
