#pragma once

#include <string>
#include <vector>

#include "rstlab/tree.hpp"

namespace rstlab {

// Dependency view of a document: one head and relation label per EDU,
// head 0 marking the root arc.
struct DepDocument {
  std::string doc_id;
  std::string genre;
  std::vector<Edu> edus;
  std::vector<int> heads;            // heads[i] belongs to EDU i+1
  std::vector<std::string> labels;   // labels[i] belongs to EDU i+1

  int size() const { return static_cast<int>(edus.size()); }
};

// Equality on EDU indices/texts, heads, and labels; genre and sentence or
// paragraph ids are carrier metadata and do not participate.
bool structurally_equal(const DepDocument& a, const DepDocument& b);

// Throws unless the document forms a single rooted tree: exactly one head 0,
// all heads in range, no cycles, n labels for n EDUs.
void validate(const DepDocument& doc);

// Tab-separated, one EDU per line: index, text, head, label.
DepDocument parse_rsd(const std::string& text, const std::string& doc_id);
DepDocument load_rsd(const std::string& path);
std::string write_rsd(const DepDocument& doc);

}  // namespace rstlab
