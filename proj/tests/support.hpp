#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rstlab/corpus.hpp"
#include "rstlab/errors.hpp"
#include "rstlab/metrics.hpp"
#include "rstlab/rsd.hpp"
#include "rstlab/tree.hpp"

// Asserts that an expression throws rstlab::Error with a specific code.
// Usable from any doctest TEST_CASE.
#define TS_THROWS_CODE(expr, code_)                 \
  do {                                              \
    bool ts_threw = false;                          \
    try {                                           \
      (void)(expr);                                 \
    } catch (const rstlab::Error& ts_err) {         \
      ts_threw = true;                              \
      CHECK(ts_err.code() == (code_));              \
    }                                               \
    CHECK_MESSAGE(ts_threw, #expr " did not throw");\
  } while (0)

// Shared helpers for the test binaries: a self-contained RNG (so test
// expectations never depend on libstdc++ distribution details), scratch
// directories, random tree generators, and an intentionally naive Parseval
// used as the oracle for the optimized scorer.
namespace ts {

// splitmix64; deterministic across platforms.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  int below(int n);                // uniform in [0, n)
  int range(int lo, int hi);       // uniform in [lo, hi]
  bool chance(double p);
  const std::string& pick(const std::vector<std::string>& pool);
};

// Creates a unique directory under the system temp root, removed on scope
// exit.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const;

 private:
  std::string path_;
};

const std::vector<std::string>& rst_labels();
const std::vector<std::string>& multinuc_labels();

std::vector<rstlab::Edu> make_edus(int n);
std::vector<rstlab::Edu> random_edus(Rng& rng, int n);

// Random constituent tree in normal form: span nodes pair one nucleus with
// one satellite, and a multinuclear child never repeats its parent's
// relation. Labels come from the pools above, so the shipped mapping table
// covers every generated tree.
rstlab::ConstituentTree random_tree(Rng& rng, int edus, const std::string& doc_id = "doc",
                                    const std::string& genre = "misc");

// Random strictly binary tree over the same EDU line; structure and labels
// are unconstrained, which makes these useful as fake parser output.
rstlab::BinaryTree random_btree(Rng& rng, int edus, const std::string& doc_id = "doc",
                                const std::string& genre = "misc");

// A damaged copy of `gold`: either a fresh random structure over the same
// EDUs or the gold structure with some labels and categories flipped.
rstlab::BinaryTree perturb(Rng& rng, const rstlab::BinaryTree& gold);

// Random single-rooted dependency document with relation labels drawn from
// the mapping-table pools.
rstlab::DepDocument random_deps(Rng& rng, int n, const std::string& doc_id = "doc",
                                const std::string& genre = "misc");

// Reference Parseval: collects the unit sets of both trees as strings and
// counts intersections by sorting. Slow and obvious on purpose.
rstlab::ParsevalCounts brute_force_parseval(
    const rstlab::BinaryTree& gold, const rstlab::BinaryTree& pred, bool include_root = false,
    const std::function<std::string(const std::string&)>& relabel = {});

// Small learnable corpus: every document chains "open ... / close ..." EDU
// pairs (nucleus plus elaboration satellite) under a joint-list root, so a
// first/last-token model can parse it perfectly. Two genres ("alpha",
// "beta") with ten documents each; per genre, documents 0-6 are train, 7-8
// dev, 9 test.
rstlab::ConstituentTree toy_doc(const std::string& doc_id, const std::string& genre, int pairs,
                                char filler);
rstlab::Corpus toy_corpus();

std::vector<const rstlab::ConstituentTree*> all_docs(const rstlab::Corpus& corpus);

// Writes <dir>/<doc_id>.rs3 plus a boundary sidecar for every document and a
// manifest.tsv; returns the manifest path.
std::string write_corpus_dir(const rstlab::Corpus& corpus, const std::string& dir);

// Runs the CLI with stdout/stderr redirected into the given strings (when
// non-null) and returns the exit code.
int run_cli_capture(const std::vector<std::string>& args, std::string* out = nullptr,
                    std::string* err = nullptr);

}  // namespace ts
