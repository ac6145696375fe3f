#pragma once

#include <map>
#include <string>
#include <vector>

#include "rstlab/tree.hpp"

namespace rstlab {

struct ManifestEntry {
  std::string doc_id;
  std::string partition;  // train | dev | test
  std::string genre;
};

// Line format: doc_id<TAB>partition<TAB>genre. Blank lines and lines starting
// with '#' are skipped.
std::vector<ManifestEntry> parse_manifest(const std::string& text);

struct Corpus {
  std::vector<ConstituentTree> docs;  // lexicographic by doc_id
  std::map<std::string, std::string> partition_by_doc;

  void add(ConstituentTree tree, const std::string& partition);
  void sort_docs();

  const ConstituentTree* find(const std::string& doc_id) const;
  const std::string& partition_of(const std::string& doc_id) const;

  // Filters are conjunctive; an empty string matches everything.
  std::vector<const ConstituentTree*> select(const std::string& partition = "",
                                             const std::string& genre = "") const;
  std::vector<std::string> genres() const;
  bool empty() const { return docs.empty(); }
};

int total_edus(const std::vector<const ConstituentTree*>& docs);

// Assigns sentence/paragraph ids from lists of EDU indices that start a new
// sentence or paragraph. EDU 1 is always an implicit start.
void apply_boundaries(ConstituentTree& tree, const std::vector<int>& sentence_starts,
                      const std::vector<int>& paragraph_starts);

// Sidecar format, one list per line: "sentences<TAB>i j k..." and
// "paragraphs<TAB>i j k...". Either line may be absent.
void apply_boundary_sidecar(ConstituentTree& tree, const std::string& sidecar_text);

struct LoadOptions {
  bool lenient = false;
  int jobs = 1;
  std::vector<std::string>* warnings = nullptr;
};

// Loads <root>/<doc_id>.rs3 for every manifest row, applying any
// <root>/<doc_id>.bnd sidecar. Genre comes from the manifest.
Corpus load_corpus(const std::string& root, const std::string& manifest_path,
                   const LoadOptions& opts = {});
Corpus load_corpus_from_entries(const std::string& root, const std::vector<ManifestEntry>& entries,
                                const LoadOptions& opts = {});

}  // namespace rstlab
