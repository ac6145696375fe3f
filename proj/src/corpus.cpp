#include "rstlab/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "rstlab/errors.hpp"
#include "rstlab/rs3.hpp"
#include "rstlab/strutil.hpp"

namespace rstlab {

namespace fs = std::filesystem;

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split_char(line, '\t');
    if (cols.size() != 3)
      throw Error(Errc::bad_manifest, "line " + std::to_string(lineno) + " has " +
                                          std::to_string(cols.size()) + " columns");
    ManifestEntry e{trim(cols[0]), trim(cols[1]), trim(cols[2])};
    if (e.doc_id.empty() || e.genre.empty())
      throw Error(Errc::bad_manifest, "line " + std::to_string(lineno) + " has empty fields");
    if (e.partition != "train" && e.partition != "dev" && e.partition != "test")
      throw Error(Errc::bad_manifest,
                  "line " + std::to_string(lineno) + ": partition \"" + e.partition + "\"");
    if (!seen.insert(e.doc_id).second) throw Error(Errc::duplicate_doc_id, e.doc_id);
    entries.push_back(std::move(e));
  }
  return entries;
}

void Corpus::add(ConstituentTree tree, const std::string& partition) {
  if (partition_by_doc.count(tree.doc_id)) throw Error(Errc::duplicate_doc_id, tree.doc_id);
  partition_by_doc[tree.doc_id] = partition;
  docs.push_back(std::move(tree));
}

void Corpus::sort_docs() {
  std::sort(docs.begin(), docs.end(), [](const ConstituentTree& a, const ConstituentTree& b) {
    return a.doc_id < b.doc_id;
  });
}

const ConstituentTree* Corpus::find(const std::string& doc_id) const {
  for (const auto& d : docs)
    if (d.doc_id == doc_id) return &d;
  return nullptr;
}

const std::string& Corpus::partition_of(const std::string& doc_id) const {
  auto it = partition_by_doc.find(doc_id);
  if (it == partition_by_doc.end()) throw Error(Errc::missing_document, doc_id);
  return it->second;
}

std::vector<const ConstituentTree*> Corpus::select(const std::string& partition,
                                                   const std::string& genre) const {
  std::vector<const ConstituentTree*> out;
  for (const auto& d : docs) {
    if (!genre.empty() && d.genre != genre) continue;
    if (!partition.empty() && partition_by_doc.at(d.doc_id) != partition) continue;
    out.push_back(&d);
  }
  return out;
}

std::vector<std::string> Corpus::genres() const {
  std::set<std::string> seen;
  for (const auto& d : docs) seen.insert(d.genre);
  return {seen.begin(), seen.end()};
}

int total_edus(const std::vector<const ConstituentTree*>& docs) {
  int n = 0;
  for (const auto* d : docs) n += static_cast<int>(d->edus.size());
  return n;
}

void apply_boundaries(ConstituentTree& tree, const std::vector<int>& sentence_starts,
                      const std::vector<int>& paragraph_starts) {
  const int n = static_cast<int>(tree.edus.size());
  auto assign = [&](const std::vector<int>& starts, bool sentence) {
    std::set<int> start_set(starts.begin(), starts.end());
    start_set.insert(1);
    for (int s : start_set)
      if (s < 1 || s > n)
        throw Error(Errc::bad_edu_index,
                    tree.doc_id + ": boundary at EDU " + std::to_string(s) + " of " +
                        std::to_string(n));
    int id = 0;
    for (auto& e : tree.edus) {
      if (start_set.count(e.index)) ++id;
      if (sentence)
        e.sentence_id = id;
      else
        e.paragraph_id = id;
    }
  };
  assign(sentence_starts, true);
  assign(paragraph_starts, false);
}

void apply_boundary_sidecar(ConstituentTree& tree, const std::string& sidecar_text) {
  std::vector<int> sentences, paragraphs;
  std::istringstream in(sidecar_text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split_char(line, '\t');
    if (cols.size() != 2)
      throw Error(Errc::bad_manifest, tree.doc_id + ": bad boundary line \"" + line + "\"");
    std::vector<int>* target = nullptr;
    if (cols[0] == "sentences")
      target = &sentences;
    else if (cols[0] == "paragraphs")
      target = &paragraphs;
    else
      throw Error(Errc::bad_manifest, tree.doc_id + ": unknown boundary kind " + cols[0]);
    for (const std::string& tok : split_ws(cols[1])) {
      try {
        target->push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw Error(Errc::bad_manifest, tree.doc_id + ": non-numeric boundary \"" + tok + "\"");
      }
    }
  }
  apply_boundaries(tree, sentences, paragraphs);
}

Corpus load_corpus_from_entries(const std::string& root, const std::vector<ManifestEntry>& entries,
                                const LoadOptions& opts) {
  for (const auto& e : entries) {
    fs::path p = fs::path(root) / (e.doc_id + ".rs3");
    if (!fs::exists(p)) throw Error(Errc::missing_document, p.string());
  }

  std::vector<ConstituentTree> trees(entries.size());
  std::vector<std::string> warnings;
  std::mutex warn_mu;
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= entries.size()) return;
      try {
        std::vector<std::string> local_warnings;
        Rs3Options ropts;
        ropts.lenient = opts.lenient;
        ropts.warnings = &local_warnings;
        fs::path p = fs::path(root) / (entries[i].doc_id + ".rs3");
        ConstituentTree t = parse_rs3(read_file(p.string()), entries[i].doc_id, ropts);
        t.genre = entries[i].genre;
        fs::path bnd = fs::path(root) / (entries[i].doc_id + ".bnd");
        if (fs::exists(bnd)) apply_boundary_sidecar(t, read_file(bnd.string()));
        trees[i] = std::move(t);
        if (!local_warnings.empty()) {
          std::lock_guard<std::mutex> lock(warn_mu);
          warnings.insert(warnings.end(), local_warnings.begin(), local_warnings.end());
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(entries.size())));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  if (opts.warnings) {
    std::sort(warnings.begin(), warnings.end());
    opts.warnings->insert(opts.warnings->end(), warnings.begin(), warnings.end());
  }

  Corpus corpus;
  for (std::size_t i = 0; i < entries.size(); ++i)
    corpus.add(std::move(trees[i]), entries[i].partition);
  corpus.sort_docs();
  return corpus;
}

Corpus load_corpus(const std::string& root, const std::string& manifest_path,
                   const LoadOptions& opts) {
  return load_corpus_from_entries(root, parse_manifest(read_file(manifest_path)), opts);
}

}  // namespace rstlab
