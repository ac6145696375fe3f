#include "support.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>

#include "rstlab/cli.hpp"
#include "rstlab/rs3.hpp"
#include "rstlab/strutil.hpp"

namespace fs = std::filesystem;
using namespace rstlab;

namespace ts {

std::uint64_t Rng::next() {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

int Rng::below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

int Rng::range(int lo, int hi) { return lo + below(hi - lo + 1); }

bool Rng::chance(double p) { return (next() >> 11) * 0x1.0p-53 < p; }

const std::string& Rng::pick(const std::vector<std::string>& pool) {
  return pool[below(static_cast<int>(pool.size()))];
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = (fs::temp_directory_path() /
           ("rstlab-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++)))
              .string();
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const { return path_ + "/" + name; }

const std::vector<std::string>& rst_labels() {
  static const std::vector<std::string> pool = {
      "elaboration-additional", "elaboration-attribute", "explanation-evidence",
      "causal-cause",           "context-background",    "adversative-concession",
      "attribution-positive",   "purpose-goal",
  };
  return pool;
}

const std::vector<std::string>& multinuc_labels() {
  static const std::vector<std::string> pool = {
      "joint-list",
      "joint-sequence",
      "adversative-contrast",
      "same-unit",
  };
  return pool;
}

std::vector<Edu> make_edus(int n) {
  std::vector<Edu> edus(n);
  for (int i = 0; i < n; ++i) {
    edus[i].index = i + 1;
    edus[i].text = "unit " + std::to_string(i + 1);
  }
  return edus;
}

std::vector<Edu> random_edus(Rng& rng, int n) {
  static const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta",
                                                 "omega", "kappa", "sigma", "theta"};
  std::vector<Edu> edus(n);
  for (int i = 0; i < n; ++i) {
    edus[i].index = i + 1;
    std::string text = rng.pick(vocab);
    for (int t = rng.range(0, 3); t > 0; --t) text += " " + rng.pick(vocab);
    edus[i].text = text;
  }
  return edus;
}

namespace {

void collect_inventory(const NaryNode& node, RelationInventory& inv) {
  if (node.is_leaf()) return;
  if (node.kind == NodeKind::span) {
    for (const auto& c : node.children)
      if (c.role == Role::satellite) inv.add(c.label, RelKind::rst);
  } else {
    inv.add(node.children.front().label, RelKind::multinuc);
  }
  for (const auto& c : node.children) collect_inventory(c, inv);
}

NaryNode random_nary(Rng& rng, int first, int last, const std::string& forbid) {
  NaryNode node;
  if (first == last) {
    node.kind = NodeKind::leaf;
    node.edu = first;
    return node;
  }
  const int size = last - first + 1;
  if (rng.chance(0.55)) {
    node.kind = NodeKind::span;
    const int split = rng.range(first, last - 1);
    NaryNode left = random_nary(rng, first, split, "");
    NaryNode right = random_nary(rng, split + 1, last, "");
    const std::string rel = rng.pick(rst_labels());
    if (rng.chance(0.5)) {
      left.role = Role::nucleus;
      left.label = kSpanLabel;
      right.role = Role::satellite;
      right.label = rel;
    } else {
      left.role = Role::satellite;
      left.label = rel;
      right.role = Role::nucleus;
      right.label = kSpanLabel;
    }
    node.children.push_back(std::move(left));
    node.children.push_back(std::move(right));
    return node;
  }
  node.kind = NodeKind::multinuc;
  std::string rel = rng.pick(multinuc_labels());
  while (rel == forbid) rel = rng.pick(multinuc_labels());
  const int k = rng.range(2, std::min(4, size));
  // k-1 distinct cut points out of the size-1 possible ones.
  std::vector<int> cuts;
  for (int c = first; c < last; ++c) cuts.push_back(c);
  for (std::size_t i = cuts.size(); i > 1; --i) std::swap(cuts[i - 1], cuts[rng.below(static_cast<int>(i))]);
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  int lo = first;
  for (int i = 0; i < k; ++i) {
    const int hi = (i < k - 1) ? cuts[i] : last;
    NaryNode child = random_nary(rng, lo, hi, rel);
    child.role = Role::nucleus;
    child.label = rel;
    node.children.push_back(std::move(child));
    lo = hi + 1;
  }
  return node;
}

}  // namespace

ConstituentTree random_tree(Rng& rng, int edus, const std::string& doc_id,
                            const std::string& genre) {
  ConstituentTree tree;
  tree.doc_id = doc_id;
  tree.genre = genre;
  tree.edus = random_edus(rng, edus);
  tree.root = random_nary(rng, 1, edus, "");
  tree.root.role = Role::nucleus;
  tree.root.label = kRootLabel;
  assign_spans(tree.root);
  collect_inventory(tree.root, tree.inventory);
  return tree;
}

namespace {

BinaryNode random_bnode(Rng& rng, int first, int last) {
  if (first == last) return make_binary_leaf(first);
  const int split = rng.range(first, last - 1);
  const Category cat = static_cast<Category>(rng.below(3));
  const std::string& label =
      cat == Category::NN ? rng.pick(multinuc_labels()) : rng.pick(rst_labels());
  return make_binary_node(cat, label, random_bnode(rng, first, split),
                          random_bnode(rng, split + 1, last));
}

void damage(Rng& rng, BinaryNode& node) {
  if (node.leaf) return;
  if (rng.chance(0.3)) node.cat = static_cast<Category>(rng.below(3));
  if (rng.chance(0.3))
    node.label = node.cat == Category::NN ? rng.pick(multinuc_labels()) : rng.pick(rst_labels());
  for (auto& c : node.children) damage(rng, c);
}

}  // namespace

BinaryTree random_btree(Rng& rng, int edus, const std::string& doc_id, const std::string& genre) {
  BinaryTree tree;
  tree.doc_id = doc_id;
  tree.genre = genre;
  tree.edus = random_edus(rng, edus);
  tree.root = random_bnode(rng, 1, edus);
  return tree;
}

BinaryTree perturb(Rng& rng, const BinaryTree& gold) {
  BinaryTree out = gold;
  const int n = static_cast<int>(gold.edus.size());
  if (n > 1 && rng.chance(0.5))
    out.root = random_bnode(rng, 1, n);
  else
    damage(rng, out.root);
  return out;
}

rstlab::DepDocument random_deps(Rng& rng, int n, const std::string& doc_id,
                                const std::string& genre) {
  DepDocument doc;
  doc.doc_id = doc_id;
  doc.genre = genre;
  doc.edus = random_edus(rng, n);
  doc.heads.assign(n, 0);
  doc.labels.assign(n, "");
  std::vector<std::string> pool = rst_labels();
  pool.insert(pool.end(), multinuc_labels().begin(), multinuc_labels().end());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(static_cast<int>(i))]);
  doc.heads[order[0] - 1] = 0;
  doc.labels[order[0] - 1] = kRootLabel;
  for (int i = 1; i < n; ++i) {
    doc.heads[order[i] - 1] = order[rng.below(i)];
    doc.labels[order[i] - 1] = rng.pick(pool);
  }
  return doc;
}

namespace {

void collect_units(const BinaryNode& node, bool is_root, bool include_root,
                   const std::function<std::string(const std::string&)>& relabel,
                   std::vector<std::string>& s, std::vector<std::string>& n,
                   std::vector<std::string>& r) {
  if (node.leaf) return;
  if (!is_root || include_root) {
    const std::string span = std::to_string(node.first) + ":" + std::to_string(node.last);
    const std::string cat = span + "|" + category_name(node.cat);
    s.push_back(span);
    n.push_back(cat);
    r.push_back(cat + "|" + (relabel ? relabel(node.label) : node.label));
  }
  for (const auto& c : node.children) collect_units(c, false, include_root, relabel, s, n, r);
}

long long overlap(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::string> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return static_cast<long long>(common.size());
}

}  // namespace

ParsevalCounts brute_force_parseval(const BinaryTree& gold, const BinaryTree& pred,
                                    bool include_root,
                                    const std::function<std::string(const std::string&)>& relabel) {
  std::vector<std::string> gs, gn, gr, ps, pn, pr;
  collect_units(gold.root, true, include_root, relabel, gs, gn, gr);
  collect_units(pred.root, true, include_root, relabel, ps, pn, pr);
  ParsevalCounts c;
  c.gold_units = static_cast<long long>(gs.size());
  c.pred_units = static_cast<long long>(ps.size());
  c.matched_s = overlap(gs, ps);
  c.matched_n = overlap(gn, pn);
  c.matched_r = overlap(gr, pr);
  return c;
}

ConstituentTree toy_doc(const std::string& doc_id, const std::string& genre, int pairs,
                        char filler) {
  ConstituentTree tree;
  tree.doc_id = doc_id;
  tree.genre = genre;
  tree.inventory.add("elaboration-additional", RelKind::rst);
  if (pairs > 1) tree.inventory.add("joint-list", RelKind::multinuc);

  std::vector<NaryNode> pair_nodes;
  for (int j = 1; j <= pairs; ++j) {
    const std::string tag = std::string(1, filler) + std::to_string(j);
    Edu a;
    a.index = 2 * j - 1;
    a.text = "open item " + tag + " detail";
    a.sentence_id = j;
    a.paragraph_id = j;
    Edu b;
    b.index = 2 * j;
    b.text = "close " + tag + " wrap";
    b.sentence_id = j;
    b.paragraph_id = j;
    tree.edus.push_back(a);
    tree.edus.push_back(b);

    NaryNode nucleus;
    nucleus.kind = NodeKind::leaf;
    nucleus.edu = a.index;
    nucleus.role = Role::nucleus;
    nucleus.label = kSpanLabel;
    NaryNode satellite;
    satellite.kind = NodeKind::leaf;
    satellite.edu = b.index;
    satellite.role = Role::satellite;
    satellite.label = "elaboration-additional";

    NaryNode pair;
    pair.kind = NodeKind::span;
    pair.children.push_back(std::move(nucleus));
    pair.children.push_back(std::move(satellite));
    pair_nodes.push_back(std::move(pair));
  }

  if (pairs == 1) {
    tree.root = std::move(pair_nodes.front());
  } else {
    tree.root.kind = NodeKind::multinuc;
    for (auto& p : pair_nodes) {
      p.role = Role::nucleus;
      p.label = "joint-list";
      tree.root.children.push_back(std::move(p));
    }
  }
  tree.root.role = Role::nucleus;
  tree.root.label = kRootLabel;
  assign_spans(tree.root);
  return tree;
}

Corpus toy_corpus() {
  Corpus corpus;
  const std::pair<std::string, char> genres[] = {{"alpha", 'a'}, {"beta", 'b'}};
  for (const auto& [genre, filler] : genres) {
    for (int i = 0; i < 10; ++i) {
      const std::string doc_id = genre + "_0" + std::to_string(i);
      const std::string partition = i <= 6 ? "train" : (i <= 8 ? "dev" : "test");
      corpus.add(toy_doc(doc_id, genre, 2 + i % 3, filler), partition);
    }
  }
  corpus.sort_docs();
  return corpus;
}

std::vector<const ConstituentTree*> all_docs(const Corpus& corpus) {
  std::vector<const ConstituentTree*> out;
  for (const auto& d : corpus.docs) out.push_back(&d);
  return out;
}

std::string write_corpus_dir(const Corpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  std::string manifest;
  for (const auto& doc : corpus.docs) {
    write_file(dir + "/" + doc.doc_id + ".rs3", write_rs3(doc));
    std::string sentences, paragraphs;
    bool any_ids = false;
    for (std::size_t i = 1; i < doc.edus.size(); ++i) {
      const Edu& prev = doc.edus[i - 1];
      const Edu& cur = doc.edus[i];
      if (cur.sentence_id && prev.sentence_id && *cur.sentence_id != *prev.sentence_id)
        sentences += " " + std::to_string(cur.index);
      if (cur.paragraph_id && prev.paragraph_id && *cur.paragraph_id != *prev.paragraph_id)
        paragraphs += " " + std::to_string(cur.index);
    }
    for (const Edu& e : doc.edus) any_ids = any_ids || e.sentence_id || e.paragraph_id;
    if (any_ids) {
      std::string bnd = "sentences\t" + trim(sentences) + "\n";
      bnd += "paragraphs\t" + trim(paragraphs) + "\n";
      write_file(dir + "/" + doc.doc_id + ".bnd", bnd);
    }
    manifest += doc.doc_id + "\t" + corpus.partition_of(doc.doc_id) + "\t" + doc.genre + "\n";
  }
  const std::string manifest_path = dir + "/manifest.tsv";
  write_file(manifest_path, manifest);
  return manifest_path;
}

namespace {

// Redirects an fd into a file for the duration of one run_cli call.
class FdCapture {
 public:
  FdCapture(int fd, const std::string& path) : fd_(fd) {
    std::fflush(nullptr);
    saved_ = ::dup(fd_);
    const int file = ::open(path.c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0644);
    if (saved_ < 0 || file < 0) throw std::runtime_error("capture setup failed");
    ::dup2(file, fd_);
    ::close(file);
  }
  ~FdCapture() {
    std::fflush(nullptr);
    ::dup2(saved_, fd_);
    ::close(saved_);
  }

 private:
  int fd_;
  int saved_;
};

}  // namespace

int run_cli_capture(const std::vector<std::string>& args, std::string* out, std::string* err) {
  std::vector<std::string> full = {"rstlab"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());

  TempDir scratch;
  int rc = 0;
  {
    std::unique_ptr<FdCapture> cap_out, cap_err;
    if (out) cap_out = std::make_unique<FdCapture>(1, scratch.file("stdout"));
    if (err) cap_err = std::make_unique<FdCapture>(2, scratch.file("stderr"));
    rc = rstlab::run_cli(static_cast<int>(argv.size()), argv.data());
  }
  if (out) *out = read_file(scratch.file("stdout"));
  if (err) *err = read_file(scratch.file("stderr"));
  return rc;
}

}  // namespace ts
