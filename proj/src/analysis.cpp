#include "rstlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rstlab/errors.hpp"

namespace rstlab {
namespace {

void check_aligned(const std::vector<const DepDocument*>& gold,
                   const std::vector<const DepDocument*>& pred) {
  if (gold.size() != pred.size())
    throw Error(Errc::doc_mismatch, std::to_string(gold.size()) + " gold vs " +
                                        std::to_string(pred.size()) + " predicted documents");
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i]->doc_id != pred[i]->doc_id)
      throw Error(Errc::doc_mismatch, gold[i]->doc_id + " vs " + pred[i]->doc_id);
    if (gold[i]->size() != pred[i]->size())
      throw Error(Errc::doc_mismatch, gold[i]->doc_id + ": EDU counts differ");
  }
}

std::string apply(const Relabel& relabel, const std::string& label) {
  return relabel ? relabel(label) : label;
}

}  // namespace

long long ConfusionMatrix::at(const std::string& gold, const std::string& pred) const {
  auto it = counts.find({gold, pred});
  return it == counts.end() ? 0 : it->second;
}

long long ConfusionMatrix::row_total(const std::string& gold) const {
  long long n = 0;
  for (const auto& [key, count] : counts)
    if (key.first == gold) n += count;
  return n;
}

bool ConfusionMatrix::diagonal() const {
  for (const auto& [key, count] : counts)
    if (key.first != key.second && count != 0) return false;
  return true;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "gold\\pred";
  for (const auto& p : pred_classes) out << ',' << p;
  out << '\n';
  for (const auto& g : gold_classes) {
    out << g;
    for (const auto& p : pred_classes) out << ',' << at(g, p);
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix confusion(const std::vector<const DepDocument*>& gold,
                          const std::vector<const DepDocument*>& pred, ConfusionFilter filter,
                          const Relabel& relabel) {
  check_aligned(gold, pred);
  ConfusionMatrix m;
  std::set<std::string> gset, pset;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    for (int i = 0; i < gold[d]->size(); ++i) {
      if (filter == ConfusionFilter::correct_attachment_only &&
          gold[d]->heads[i] != pred[d]->heads[i])
        continue;
      const std::string g = apply(relabel, gold[d]->labels[i]);
      const std::string p = apply(relabel, pred[d]->labels[i]);
      ++m.counts[{g, p}];
      gset.insert(g);
      pset.insert(p);
    }
  }
  m.gold_classes.assign(gset.begin(), gset.end());
  m.pred_classes.assign(pset.begin(), pset.end());
  return m;
}

std::vector<ClassAccuracy> per_class_accuracy(const std::vector<const DepDocument*>& gold,
                                              const std::vector<const DepDocument*>& pred,
                                              const Relabel& relabel) {
  check_aligned(gold, pred);
  std::map<std::string, ClassAccuracy> rows;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    for (int i = 0; i < gold[d]->size(); ++i) {
      const std::string g = apply(relabel, gold[d]->labels[i]);
      ClassAccuracy& row = rows[g];
      row.cls = g;
      ++row.total;
      if (gold[d]->heads[i] == pred[d]->heads[i] &&
          g == apply(relabel, pred[d]->labels[i]))
        ++row.correct;
    }
  }
  std::vector<ClassAccuracy> out;
  for (auto& [cls, row] : rows) {
    row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.total);
    out.push_back(row);
  }
  return out;
}

std::map<std::string, std::map<std::string, long long>> error_table(
    const std::vector<const DepDocument*>& gold, const std::vector<const DepDocument*>& pred,
    ConfusionFilter filter, bool errors_only, const Relabel& relabel) {
  check_aligned(gold, pred);
  std::map<std::string, std::map<std::string, long long>> table;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    for (int i = 0; i < gold[d]->size(); ++i) {
      if (filter == ConfusionFilter::correct_attachment_only &&
          gold[d]->heads[i] != pred[d]->heads[i])
        continue;
      const std::string g = apply(relabel, gold[d]->labels[i]);
      if (errors_only && g == apply(relabel, pred[d]->labels[i])) continue;
      ++table[gold[d]->genre][g];
    }
  }
  return table;
}

double ResidualTable::at(const std::string& row, const std::string& col) const {
  auto it = residual.find({row, col});
  return it == residual.end() ? 0.0 : it->second;
}

std::string ResidualTable::to_csv() const {
  std::ostringstream out;
  out << "row\\col";
  for (const auto& c : cols) out << ',' << c;
  out << ",max_class\n";
  for (const auto& r : rows) {
    out << r;
    for (const auto& c : cols) out << ',' << at(r, c);
    out << ',' << max_class_by_row.at(r) << '\n';
  }
  return out.str();
}

ResidualTable chi2_residuals(
    const std::map<std::string, std::map<std::string, long long>>& table) {
  ResidualTable out;
  std::set<std::string> cols;
  std::map<std::string, long long> row_totals, col_totals;
  long long grand = 0;
  for (const auto& [row, by_col] : table) {
    out.rows.push_back(row);
    for (const auto& [col, count] : by_col) {
      if (count < 0) throw Error(Errc::zero_margin, "negative count");
      cols.insert(col);
      row_totals[row] += count;
      col_totals[col] += count;
      grand += count;
    }
  }
  out.cols.assign(cols.begin(), cols.end());
  if (grand == 0) throw Error(Errc::zero_margin, "empty table");
  for (const auto& r : out.rows)
    if (row_totals[r] == 0) throw Error(Errc::zero_margin, "row " + r);
  for (const auto& c : out.cols)
    if (col_totals[c] == 0) throw Error(Errc::zero_margin, "column " + c);

  for (const auto& r : out.rows) {
    double best = -1.0;
    std::string best_class;
    for (const auto& c : out.cols) {
      const double expected = static_cast<double>(row_totals[r]) *
                              static_cast<double>(col_totals[c]) / static_cast<double>(grand);
      long long observed = 0;
      auto row_it = table.find(r);
      auto cell = row_it->second.find(c);
      if (cell != row_it->second.end()) observed = cell->second;
      const double res = (static_cast<double>(observed) - expected) / std::sqrt(expected);
      out.residual[{r, c}] = res;
      if (std::abs(res) > best) {
        best = std::abs(res);
        best_class = c;
      }
    }
    out.max_class_by_row[r] = best_class;
  }
  return out;
}

double cdu_accuracy(const std::vector<const DepDocument*>& gold,
                    const std::vector<const DepDocument*>& pred) {
  check_aligned(gold, pred);
  if (gold.empty()) throw Error(Errc::empty_input, "no documents");
  long long correct = 0;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    int g = 0, p = 0;
    for (int i = 0; i < gold[d]->size(); ++i) {
      if (gold[d]->heads[i] == 0) g = i + 1;
      if (pred[d]->heads[i] == 0) p = i + 1;
    }
    if (g == p) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

namespace {

void collect_cat_spans(const BinaryNode& node, bool at_root,
                       std::map<Category, std::set<std::pair<int, int>>>& spans) {
  if (node.leaf) return;
  if (!at_root) spans[node.cat].insert({node.first, node.last});
  for (const auto& c : node.children) collect_cat_spans(c, false, spans);
}

}  // namespace

std::vector<BranchingRow> branching_report(const std::vector<const BinaryTree*>& gold,
                                           const std::vector<const BinaryTree*>& pred) {
  if (gold.size() != pred.size())
    throw Error(Errc::doc_mismatch, std::to_string(gold.size()) + " gold vs " +
                                        std::to_string(pred.size()) + " predicted documents");
  std::map<Category, BranchingRow> rows;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    if (gold[d]->edus.size() != pred[d]->edus.size())
      throw Error(Errc::doc_mismatch, gold[d]->doc_id + ": EDU counts differ");
    std::map<Category, std::set<std::pair<int, int>>> gspans, pspans;
    collect_cat_spans(gold[d]->root, true, gspans);
    collect_cat_spans(pred[d]->root, true, pspans);
    for (Category cat : {Category::NS, Category::SN, Category::NN}) {
      const auto git = gspans.find(cat);
      const auto pit = pspans.find(cat);
      if (git == gspans.end() && pit == pspans.end()) continue;
      BranchingRow& row = rows[cat];
      row.cat = cat;
      if (git != gspans.end()) row.gold_units += static_cast<long long>(git->second.size());
      if (pit != pspans.end()) row.pred_units += static_cast<long long>(pit->second.size());
      if (git != gspans.end() && pit != pspans.end())
        for (const auto& span : git->second)
          if (pit->second.count(span)) ++row.matched;
    }
  }
  std::vector<BranchingRow> out;
  for (auto& [cat, row] : rows) {
    const long long denom = row.gold_units + row.pred_units;
    row.f1 = denom ? 200.0 * static_cast<double>(row.matched) / static_cast<double>(denom) : 100.0;
    out.push_back(row);
  }
  return out;
}

}  // namespace rstlab
