#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rstlab/rsd.hpp"
#include "rstlab/tree.hpp"

namespace rstlab {

using Relabel = std::function<std::string(const std::string&)>;

enum class ConfusionFilter {
  all,
  // Keep only EDUs whose predicted head equals the gold head, so the matrix
  // reflects pure labeling errors.
  correct_attachment_only,
};

struct ConfusionMatrix {
  std::vector<std::string> gold_classes, pred_classes;  // sorted, as observed
  std::map<std::pair<std::string, std::string>, long long> counts;

  long long at(const std::string& gold, const std::string& pred) const;
  long long row_total(const std::string& gold) const;
  bool diagonal() const;
  std::string to_csv() const;
};

// Documents must align pairwise by doc id and EDU count; labels pass through
// `relabel` when given (wire a coarse-class collapse there).
ConfusionMatrix confusion(const std::vector<const DepDocument*>& gold,
                          const std::vector<const DepDocument*>& pred, ConfusionFilter filter,
                          const Relabel& relabel = {});

struct ClassAccuracy {
  std::string cls;
  long long correct = 0;  // head and class both right
  long long total = 0;
  double accuracy = 0;
};

std::vector<ClassAccuracy> per_class_accuracy(const std::vector<const DepDocument*>& gold,
                                              const std::vector<const DepDocument*>& pred,
                                              const Relabel& relabel = {});

// genre -> class -> count of misclassified instances (or all instances when
// errors_only is false), for the residual analysis.
std::map<std::string, std::map<std::string, long long>> error_table(
    const std::vector<const DepDocument*>& gold, const std::vector<const DepDocument*>& pred,
    ConfusionFilter filter, bool errors_only, const Relabel& relabel = {});

struct ResidualTable {
  std::vector<std::string> rows, cols;             // sorted
  std::map<std::pair<std::string, std::string>, double> residual;  // (O-E)/sqrt(E)
  std::map<std::string, std::string> max_class_by_row;             // argmax |residual|

  double at(const std::string& row, const std::string& col) const;
  std::string to_csv() const;
};

// Pearson residuals of an observed-count table; every present row and
// column must have a nonzero margin.
ResidualTable chi2_residuals(const std::map<std::string, std::map<std::string, long long>>& table);

// Fraction of aligned documents whose root EDU matches.
double cdu_accuracy(const std::vector<const DepDocument*>& gold,
                    const std::vector<const DepDocument*>& pred);

struct BranchingRow {
  Category cat = Category::NS;
  long long gold_units = 0, pred_units = 0, matched = 0;
  double f1 = 0;
};

// Span F1 restricted to units of each nuclearity category; rows appear only
// for categories present on either side.
std::vector<BranchingRow> branching_report(const std::vector<const BinaryTree*>& gold,
                                           const std::vector<const BinaryTree*>& pred);

}  // namespace rstlab
