#pragma once

#include <string>
#include <vector>

#include "rstlab/tree.hpp"

namespace rstlab {

struct Rs3Options {
  // When set, empty segments that nothing else attaches to are dropped with a
  // warning instead of aborting the parse.
  bool lenient = false;
  std::vector<std::string>* warnings = nullptr;
};

// Parses rs3 markup into a constituent tree in normal form: every span group
// becomes a nucleus/satellite pair (satellites nested closest-first, a left
// satellite inside a right one on ties) and nested multinuc nodes that repeat
// the enclosing relation are flattened into their parent.
ConstituentTree parse_rs3(const std::string& xml, const std::string& doc_id,
                          const Rs3Options& opts = {});

// Reads the file and parses it; the document id is the file stem.
ConstituentTree load_rs3(const std::string& path, const Rs3Options& opts = {});

// Serializes a tree back to rs3. Every internal node is materialized as a
// group, so parse_rs3(write_rs3(t)) reproduces t exactly. Relations used by
// the tree but missing from its inventory are declared on the fly.
std::string write_rs3(const ConstituentTree& tree);

}  // namespace rstlab
