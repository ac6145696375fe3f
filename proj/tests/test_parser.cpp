#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "rstlab/depconv.hpp"
#include "rstlab/errors.hpp"
#include "rstlab/metrics.hpp"
#include "rstlab/parser.hpp"
#include "rstlab/strutil.hpp"
#include "rstlab/treeops.hpp"

#include "support.hpp"

using namespace rstlab;

namespace {

Transition shift_t() { return Transition{}; }

Transition reduce_t(Category cat, const std::string& label) {
  Transition t;
  t.shift = false;
  t.cat = cat;
  t.label = label;
  return t;
}

// Two EDUs, satellite on the right.
BinaryTree ns_pair() {
  BinaryTree t;
  t.doc_id = "pair";
  t.edus = ts::make_edus(2);
  t.root = make_binary_node(Category::NS, "elaboration-additional", make_binary_leaf(1),
                            make_binary_leaf(2));
  return t;
}

std::set<std::string> feature_set(const ParserState& state, const std::vector<Edu>& edus,
                                  const DocAnnotations& ann, const FeatureConfig& config) {
  const std::vector<std::string> v = extract_features(state, edus, ann, config);
  std::set<std::string> out(v.begin(), v.end());
  CHECK(out.size() == v.size());  // no duplicate features from one state
  return out;
}

// State with leaves 1..k on the stack and EDU k+1 at the queue front.
ParserState state_after_shifts(int k, int edu_count) {
  ParserState s;
  s.edu_count = edu_count;
  for (int i = 1; i <= k; ++i) s.stack.push_back(make_binary_leaf(i));
  s.next_edu = k + 1;
  return s;
}

std::vector<TrainDoc> as_train_docs(const std::vector<BinaryTree>& golds) {
  std::vector<TrainDoc> out;
  out.reserve(golds.size());
  for (const auto& g : golds) out.push_back({&g, {}});
  return out;
}

// Binarized gold trees for every document of the corpus, in corpus order.
std::vector<BinaryTree> binarized_docs(const Corpus& corpus) {
  std::vector<BinaryTree> out;
  const auto docs = ts::all_docs(corpus);
  out.reserve(docs.size());
  for (const ConstituentTree* t : docs) out.push_back(binarize(*t));
  return out;
}

double in_sample_s(const Model& model, const std::vector<BinaryTree>& golds) {
  ParsevalCounts pooled;
  for (const auto& g : golds) {
    const BinaryTree parsed = parse(model, g.edus, {}, g.doc_id, g.genre);
    pooled += parseval(g, parsed);
  }
  return triple_from(pooled).s;
}

}  // namespace

TEST_CASE("parser: transition keys are stable") {
  CHECK(shift_t().key() == "shift");
  CHECK(reduce_t(Category::NS, "elaboration-additional").key() ==
        "reduce NS elaboration-additional");
  CHECK(reduce_t(Category::SN, "adversative-concession").key() ==
        "reduce SN adversative-concession");
  CHECK(reduce_t(Category::NN, "joint-list").key() == "reduce NN joint-list");
}

TEST_CASE("parser: model action lookup") {
  Model m;
  m.actions = {shift_t(), reduce_t(Category::NS, "a"), reduce_t(Category::NN, "b")};
  CHECK(m.action_id(shift_t()) == 0);
  CHECK(m.action_id(reduce_t(Category::NN, "b")) == 2);
  CHECK(m.action_id(reduce_t(Category::SN, "a")) == -1);
  CHECK(m.action_id(reduce_t(Category::NS, "c")) == -1);
  CHECK_FALSE(m.empty());
  CHECK(Model{}.empty());
}

TEST_CASE("parser: feature config fingerprints") {
  std::set<std::uint64_t> seen;
  for (bool org : {false, true})
    for (StackingMode mode : {StackingMode::none, StackingMode::label, StackingMode::graph})
      seen.insert(FeatureConfig{org, mode}.fingerprint());
  CHECK(seen.size() == 6);

  // The fingerprint hashes a versioned description string, so it stays
  // stable across builds and platforms.
  CHECK(FeatureConfig{true, StackingMode::none}.fingerprint() == fnv1a("v1;org=1;stacking=none"));
  CHECK(FeatureConfig{false, StackingMode::graph}.fingerprint() ==
        fnv1a("v1;org=0;stacking=graph"));
}

TEST_CASE("parser: oracle on a two-EDU pair") {
  const std::vector<Transition> seq = oracle(ns_pair());
  REQUIRE(seq.size() == 3);
  CHECK(seq[0].key() == "shift");
  CHECK(seq[1].key() == "shift");
  CHECK(seq[2].key() == "reduce NS elaboration-additional");
}

TEST_CASE("parser: oracle reduces as early as possible") {
  SUBCASE("right-branching tree reduces only at the end") {
    BinaryTree t;
    t.edus = ts::make_edus(3);
    t.root = make_binary_node(Category::NS, "outer", make_binary_leaf(1),
                              make_binary_node(Category::NS, "inner", make_binary_leaf(2),
                                               make_binary_leaf(3)));
    std::vector<std::string> keys;
    for (const auto& tr : oracle(t)) keys.push_back(tr.key());
    CHECK(keys == std::vector<std::string>{"shift", "shift", "shift", "reduce NS inner",
                                           "reduce NS outer"});
  }
  SUBCASE("left-branching tree reduces before the last shift") {
    BinaryTree t;
    t.edus = ts::make_edus(3);
    t.root = make_binary_node(Category::SN, "outer",
                              make_binary_node(Category::NN, "inner", make_binary_leaf(1),
                                               make_binary_leaf(2)),
                              make_binary_leaf(3));
    std::vector<std::string> keys;
    for (const auto& tr : oracle(t)) keys.push_back(tr.key());
    CHECK(keys == std::vector<std::string>{"shift", "shift", "reduce NN inner", "shift",
                                           "reduce SN outer"});
  }
  SUBCASE("single EDU derives with one shift") {
    BinaryTree t;
    t.edus = ts::make_edus(1);
    t.root = make_binary_leaf(1);
    const std::vector<Transition> seq = oracle(t);
    REQUIRE(seq.size() == 1);
    CHECK(seq[0].shift);
  }
}

TEST_CASE("parser: replay rebuilds the oracle's tree") {
  ts::Rng rng(0x5eedf00d);
  for (int iter = 0; iter < 60; ++iter) {
    const int n = rng.range(1, 24);
    const BinaryTree gold = binarize(ts::random_tree(rng, n));
    const std::vector<Transition> seq = oracle(gold);
    CHECK(seq.size() == static_cast<std::size_t>(2 * n - 1));
    const BinaryTree back = replay(gold.edus, seq);
    CHECK(structurally_equal(gold.root, back.root));
  }
  // Arbitrary binary structure, not just normal-form output.
  for (int iter = 0; iter < 60; ++iter) {
    const int n = rng.range(1, 24);
    const BinaryTree gold = ts::random_btree(rng, n);
    const BinaryTree back = replay(gold.edus, oracle(gold));
    CHECK(structurally_equal(gold.root, back.root));
  }
}

TEST_CASE("parser: oracle rejects a tree whose spans do not tile") {
  // Both leaves claim EDU 1, so the root span never covers EDU 2 and the
  // derivation cannot finish.
  BinaryTree bad;
  bad.edus = ts::make_edus(2);
  bad.root = make_binary_node(Category::NS, "elaboration-additional", make_binary_leaf(1),
                              make_binary_leaf(1));
  TS_THROWS_CODE(oracle(bad), Errc::illegal_transition);
}

TEST_CASE("parser: replay rejects broken sequences") {
  const std::vector<Edu> edus = ts::make_edus(2);
  const Transition red = reduce_t(Category::NS, "elaboration-additional");

  SUBCASE("shift past the end of the queue") {
    TS_THROWS_CODE(replay(edus, {shift_t(), shift_t(), shift_t()}), Errc::illegal_transition);
  }
  SUBCASE("reduce with fewer than two spans") {
    TS_THROWS_CODE(replay(edus, {shift_t(), red}), Errc::illegal_transition);
  }
  SUBCASE("sequence stops with the queue unread") {
    TS_THROWS_CODE(replay(edus, {shift_t()}), Errc::non_terminal_end);
  }
  SUBCASE("sequence stops with two spans on the stack") {
    TS_THROWS_CODE(replay(edus, {shift_t(), shift_t()}), Errc::non_terminal_end);
  }
  SUBCASE("empty sequence") {
    TS_THROWS_CODE(replay(edus, {}), Errc::non_terminal_end);
  }
}

TEST_CASE("parser: queue-only features on the initial state") {
  std::vector<Edu> edus(1);
  edus[0].index = 1;
  edus[0].text = "Hello world";
  ParserState state;
  state.edu_count = 1;

  const auto feats = feature_set(state, edus, {}, FeatureConfig{});
  CHECK(feats == std::set<std::string>{"q0_first=hello", "q0_last=world", "q0_len=2-3"});
}

TEST_CASE("parser: span features combine stack and queue slots") {
  // EDUs: "alpha one" | "beta two" | "gamma three"; stack holds 1 and 2.
  std::vector<Edu> edus(3);
  edus[0] = {1, "Alpha one", {}, {}};
  edus[1] = {2, "beta TWO", {}, {}};
  edus[2] = {3, "gamma three", {}, {}};
  const ParserState state = state_after_shifts(2, 3);

  const auto feats = feature_set(state, edus, {}, FeatureConfig{});
  CHECK(feats.count("s0_first=beta"));
  CHECK(feats.count("s0_last=two"));
  CHECK(feats.count("s0_len=2-3"));
  CHECK(feats.count("s1_first=alpha"));
  CHECK(feats.count("s1_last=one"));
  CHECK(feats.count("q0_first=gamma"));
  CHECK(feats.count("q0_last=three"));
  CHECK(feats.count("s0f+s1f=beta|alpha"));
  CHECK(feats.count("s0l+s1l=two|one"));
  CHECK(feats.count("s0f+q0f=beta|gamma"));
  CHECK(feats.count("s0l+q0f=two|gamma"));
  CHECK(feats.count("s1f+q0f=alpha|gamma"));
  CHECK(feats.size() == 14);  // 3 slots x 3 + 5 pairs
}

TEST_CASE("parser: span length uses the whole span's tokens") {
  std::vector<Edu> edus(3);
  edus[0] = {1, "a b c", {}, {}};
  edus[1] = {2, "d e f", {}, {}};
  edus[2] = {3, "g", {}, {}};
  ParserState state;
  state.edu_count = 3;
  state.next_edu = 3;
  state.stack.push_back(make_binary_node(Category::NN, "joint-list", make_binary_leaf(1),
                                         make_binary_leaf(2)));

  const auto feats = feature_set(state, edus, {}, FeatureConfig{});
  // Six tokens across EDUs 1-2; first token of EDU 1, last of EDU 2.
  CHECK(feats.count("s0_first=a"));
  CHECK(feats.count("s0_last=f"));
  CHECK(feats.count("s0_len=4-7"));
}

TEST_CASE("parser: organizational features") {
  std::vector<Edu> edus(3);
  edus[0] = {1, "one", 1, 1};
  edus[1] = {2, "two", 1, 2};
  edus[2] = {3, "three", 2, 2};

  SUBCASE("sentence and paragraph comparisons") {
    const auto feats = feature_set(state_after_shifts(2, 3), edus, {}, FeatureConfig{});
    CHECK(feats.count("org_s0s1_sent=same"));  // sent(1) vs sent(2)
    CHECK(feats.count("org_s0s1_para=diff"));  // para 1 vs 2
    CHECK(feats.count("org_s0q0_sent=diff"));  // sent(2) vs sent(3)
    CHECK(feats.count("org_s0q0_para=same"));  // para 2 vs 2
  }
  SUBCASE("paragraph starts") {
    const auto start = feature_set(ParserState{{}, 1, 3}, edus, {}, FeatureConfig{});
    CHECK(start.count("org_q0_starts_para"));  // first EDU of the document
    const auto mid = feature_set(state_after_shifts(1, 3), edus, {}, FeatureConfig{});
    CHECK(mid.count("org_s0_starts_para"));  // s0 = EDU 1 opens the document
    CHECK(mid.count("org_q0_starts_para"));  // paragraph changes 1 -> 2 at EDU 2
    const auto third = feature_set(state_after_shifts(2, 3), edus, {}, FeatureConfig{});
    CHECK_FALSE(third.count("org_q0_starts_para"));  // EDU 3 stays in paragraph 2
  }
  SUBCASE("missing ids contribute nothing") {
    std::vector<Edu> bare(3);
    for (int i = 0; i < 3; ++i) bare[i] = {i + 1, "x", {}, {}};
    const auto feats = feature_set(state_after_shifts(2, 3), bare, {}, FeatureConfig{});
    for (const auto& f : feats) CHECK(f.rfind("org_", 0) != 0);
  }
  SUBCASE("disabled by configuration") {
    const auto feats =
        feature_set(state_after_shifts(2, 3), edus, {}, FeatureConfig{false, StackingMode::none});
    for (const auto& f : feats) CHECK(f.rfind("org_", 0) != 0);
  }
}

TEST_CASE("parser: paragraph change fires the starts-para feature") {
  std::vector<Edu> edus(2);
  edus[0] = {1, "one", 1, 1};
  edus[1] = {2, "two", 2, 2};
  const auto feats = feature_set(state_after_shifts(1, 2), edus, {}, FeatureConfig{});
  CHECK(feats.count("org_q0_starts_para"));  // paragraph 1 -> 2 at EDU 2
  CHECK(feats.count("org_s0_starts_para"));  // EDU 1 opens the document
}

TEST_CASE("parser: stacking features") {
  std::vector<Edu> edus(3);
  for (int i = 0; i < 3; ++i) edus[i] = {i + 1, "x y", {}, {}};
  DocAnnotations ann(3);
  ann[0] = {"elaboration", "root", "0"};
  ann[1] = {"joint", "left", "1"};
  ann[2] = {"cause", "right", "2"};
  const ParserState state = state_after_shifts(2, 3);

  SUBCASE("label mode emits one feature per slot") {
    const auto feats = feature_set(state, edus, ann, FeatureConfig{true, StackingMode::label});
    CHECK(feats.count("s0_deplab=joint"));
    CHECK(feats.count("s1_deplab=elaboration"));
    CHECK(feats.count("q0_deplab=cause"));
    for (const auto& f : feats) CHECK(f.find("depdir") == std::string::npos);
  }
  SUBCASE("graph mode emits direction, distance and the pair") {
    const auto feats = feature_set(state, edus, ann, FeatureConfig{true, StackingMode::graph});
    CHECK(feats.count("s0_depdir=left"));
    CHECK(feats.count("s0_depdist=1"));
    CHECK(feats.count("s0_depdirdist=left|1"));
    CHECK(feats.count("s1_depdir=root"));
    CHECK(feats.count("s1_depdist=0"));
    CHECK(feats.count("q0_depdir=right"));
    for (const auto& f : feats) CHECK(f.find("deplab") == std::string::npos);
  }
  SUBCASE("mode none ignores annotations") {
    const auto feats = feature_set(state, edus, ann, FeatureConfig{true, StackingMode::none});
    for (const auto& f : feats) CHECK(f.find("dep") == std::string::npos);
  }
  SUBCASE("no annotations, no features") {
    const auto feats = feature_set(state, edus, {}, FeatureConfig{true, StackingMode::graph});
    for (const auto& f : feats) CHECK(f.find("dep") == std::string::npos);
  }
  SUBCASE("spans use their first EDU's annotation") {
    ParserState wide;
    wide.edu_count = 3;
    wide.next_edu = 4;
    wide.stack.push_back(make_binary_leaf(1));
    wide.stack.push_back(make_binary_node(Category::NN, "joint-list", make_binary_leaf(2),
                                          make_binary_leaf(3)));
    const auto feats = feature_set(wide, edus, ann, FeatureConfig{true, StackingMode::label});
    CHECK(feats.count("s0_deplab=joint"));  // EDU 2 heads the s0 span
  }
}

TEST_CASE("parser: distance buckets") {
  CHECK(distance_bucket(0) == "0");
  CHECK(distance_bucket(-4) == "0");
  CHECK(distance_bucket(1) == "1");
  CHECK(distance_bucket(2) == "2");
  CHECK(distance_bucket(3) == "3-5");
  CHECK(distance_bucket(5) == "3-5");
  CHECK(distance_bucket(6) == "6-10");
  CHECK(distance_bucket(10) == "6-10");
  CHECK(distance_bucket(11) == ">10");
  CHECK(distance_bucket(100) == ">10");
}

TEST_CASE("parser: annotations from a dependency document") {
  DepDocument d;
  d.doc_id = "deps";
  d.edus = ts::make_edus(4);
  d.heads = {0, 1, 4, 2};
  d.labels = {"root", "elaboration", "joint", "cause"};

  SUBCASE("label mode") {
    const DocAnnotations ann = annotations_from_dependencies(d, StackingMode::label);
    REQUIRE(ann.size() == 4);
    CHECK(ann[0].dep_label == "root");
    CHECK(ann[3].dep_label == "cause");
    CHECK(ann[1].dep_direction.empty());
    CHECK(ann[1].dep_distance.empty());
  }
  SUBCASE("graph mode") {
    const DocAnnotations ann = annotations_from_dependencies(d, StackingMode::graph);
    REQUIRE(ann.size() == 4);
    CHECK(ann[0].dep_direction == "root");
    CHECK(ann[0].dep_distance == "0");
    CHECK(ann[1].dep_direction == "left");   // head 1 < 2
    CHECK(ann[1].dep_distance == "1");
    CHECK(ann[2].dep_direction == "right");  // head 4 > 3
    CHECK(ann[2].dep_distance == "1");
    CHECK(ann[3].dep_direction == "left");   // head 2 < 4
    CHECK(ann[3].dep_distance == "2");
    CHECK(ann[0].dep_label.empty());
  }
  SUBCASE("mode none yields empty annotations") {
    const DocAnnotations ann = annotations_from_dependencies(d, StackingMode::none);
    REQUIRE(ann.size() == 4);
    for (const auto& a : ann) {
      CHECK(a.dep_label.empty());
      CHECK(a.dep_direction.empty());
      CHECK(a.dep_distance.empty());
    }
  }
}

TEST_CASE("parser: ties pick the smallest action id") {
  // A model with no weights scores every action zero, so decoding must
  // fall back on action order: shift while the queue lasts, then reduce.
  Model m;
  m.actions = {shift_t(), reduce_t(Category::NS, "elaboration-additional")};
  const std::vector<Edu> edus = ts::make_edus(3);

  const BinaryTree t = parse(m, edus, {}, "tie");
  BinaryTree expect;
  expect.edus = edus;
  expect.root = make_binary_node(
      Category::NS, "elaboration-additional", make_binary_leaf(1),
      make_binary_node(Category::NS, "elaboration-additional", make_binary_leaf(2),
                       make_binary_leaf(3)));
  CHECK(structurally_equal(t.root, expect.root));
}

TEST_CASE("parser: parse argument errors") {
  Model m;
  m.actions = {shift_t(), reduce_t(Category::NS, "a")};
  TS_THROWS_CODE(parse(Model{}, ts::make_edus(2), {}), Errc::empty_train_set);
  TS_THROWS_CODE(parse(m, {}, {}), Errc::empty_input);
}

TEST_CASE("parser: model serialization round trip") {
  Model m;
  m.config = FeatureConfig{true, StackingMode::label};
  m.actions = {shift_t(), reduce_t(Category::NS, "elaboration-additional"),
               reduce_t(Category::NN, "joint-list")};
  m.weights["s0_first=open"] = {0.5, -1.25, 0.0};
  m.weights["q0_len=1"] = {-2.0, 1.0 / 3.0, 7.5};
  m.weights["bias"] = {0.0625, 0.0, -0.125};

  const std::string text = serialize_model(m);
  const Model back = deserialize_model(text, m.config);
  CHECK(back.actions.size() == m.actions.size());
  for (std::size_t i = 0; i < m.actions.size(); ++i) CHECK(back.actions[i] == m.actions[i]);
  REQUIRE(back.weights.size() == m.weights.size());
  for (const auto& [feature, row] : m.weights) {
    REQUIRE(back.weights.count(feature));
    CHECK(back.weights.at(feature) == row);  // exact doubles via max precision
  }
  CHECK(serialize_model(back) == text);
}

TEST_CASE("parser: model deserialization errors") {
  Model m;
  m.config = FeatureConfig{};
  m.actions = {shift_t()};
  const std::string text = serialize_model(m);

  SUBCASE("wrong feature config") {
    TS_THROWS_CODE(deserialize_model(text, FeatureConfig{false, StackingMode::none}),
                   Errc::model_hash_mismatch);
  }
  SUBCASE("not a model file") {
    TS_THROWS_CODE(deserialize_model("just some text\n", FeatureConfig{}), Errc::io_error);
  }
  SUBCASE("truncated file") {
    TS_THROWS_CODE(deserialize_model("rstlab-model 1\n", FeatureConfig{}), Errc::io_error);
  }
}

TEST_CASE("parser: model files on disk") {
  ts::TempDir dir;
  Model m;
  m.config = FeatureConfig{false, StackingMode::graph};
  m.actions = {shift_t(), reduce_t(Category::SN, "context-background")};
  m.weights["s0_depdir=left"] = {1.0, -1.0};

  const std::string path = dir.file("model.txt");
  save_model(m, path);
  const Model back = load_model(path, m.config);
  CHECK(serialize_model(back) == serialize_model(m));

  SUBCASE("auto load recovers the feature config") {
    const Model sniffed = load_model_auto(path);
    CHECK(sniffed.config.organizational == false);
    CHECK(sniffed.config.stacking == StackingMode::graph);
    CHECK(serialize_model(sniffed) == serialize_model(m));
  }
  SUBCASE("auto load rejects unknown fingerprints") {
    write_file(path, "rstlab-model 1\nfingerprint deadbeef\nactions 0\nfeatures 0\n");
    TS_THROWS_CODE(load_model_auto(path), Errc::model_hash_mismatch);
  }
}

TEST_CASE("parser: training memorizes the toy corpus") {
  const Corpus corpus = ts::toy_corpus();
  const std::vector<BinaryTree> golds = binarized_docs(corpus);
  REQUIRE(golds.size() == 20);

  TrainConfig config;
  config.seed = 7;
  std::vector<std::pair<int, double>> curve;
  config.epoch_dev_s = &curve;

  const Model model = train(as_train_docs(golds), {}, config);
  CHECK_FALSE(model.empty());
  CHECK(model.action_id(shift_t()) == 0);
  CHECK(in_sample_s(model, golds) >= 95.0);

  REQUIRE_FALSE(curve.empty());
  CHECK(curve.front().first == 1);
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i].first == curve[i - 1].first + 1);
  CHECK(curve.size() <= 20);
}

TEST_CASE("parser: training is deterministic for a fixed seed") {
  const Corpus corpus = ts::toy_corpus();
  const std::vector<BinaryTree> golds = binarized_docs(corpus);
  TrainConfig config;
  config.seed = 11;
  config.max_epochs = 6;
  const Model a = train(as_train_docs(golds), {}, config);
  const Model b = train(as_train_docs(golds), {}, config);
  CHECK(serialize_model(a) == serialize_model(b));
}

TEST_CASE("parser: training requires documents") {
  TS_THROWS_CODE(train({}, {}, TrainConfig{}), Errc::empty_train_set);
}

TEST_CASE("parser: warm start") {
  const Corpus corpus = ts::toy_corpus();
  const std::vector<BinaryTree> golds = binarized_docs(corpus);
  const std::vector<TrainDoc> docs = as_train_docs(golds);
  TrainConfig config;
  config.seed = 3;
  config.max_epochs = 4;

  SUBCASE("an empty base model degenerates to plain training") {
    const Model plain = train(docs, {}, config);
    const Model warmed = warm_start(Model{}, docs, {}, config);
    CHECK(serialize_model(plain) == serialize_model(warmed));
  }
  SUBCASE("feature configs must match") {
    Model base = train(docs, {}, config);
    TrainConfig other = config;
    other.features = FeatureConfig{true, StackingMode::label};
    TS_THROWS_CODE(warm_start(base, docs, {}, other), Errc::model_hash_mismatch);
  }
  SUBCASE("continuing on the same data keeps the action inventory") {
    const Model base = train(docs, {}, config);
    const Model more = warm_start(base, docs, {}, config);
    CHECK(more.actions.size() == base.actions.size());
    CHECK(in_sample_s(more, golds) >= 95.0);
  }
  SUBCASE("new actions are rejected") {
    // A single-pair document needs only shift and one NS reduce; the full
    // corpus also needs the multinuclear reduce.
    std::vector<BinaryTree> small;
    small.push_back(binarize(ts::toy_doc("solo", "alpha", 1, 'z')));
    const Model base = train(as_train_docs(small), {}, config);
    CHECK(base.actions.size() == 2);
    TS_THROWS_CODE(warm_start(base, docs, {}, config), Errc::inventory_mismatch);
  }
}

TEST_CASE("parser: dev selection prefers the held-out set") {
  const Corpus corpus = ts::toy_corpus();
  const std::vector<BinaryTree> golds = binarized_docs(corpus);
  std::vector<BinaryTree> train_set, dev_set;
  for (const auto& g : golds) {
    if (corpus.partition_of(g.doc_id) == "dev")
      dev_set.push_back(g);
    else
      train_set.push_back(g);
  }
  REQUIRE(dev_set.size() == 4);

  TrainConfig config;
  config.seed = 5;
  std::vector<std::pair<int, double>> curve;
  config.epoch_dev_s = &curve;
  const Model model = train(as_train_docs(train_set), as_train_docs(dev_set), config);
  CHECK_FALSE(model.empty());
  CHECK_FALSE(curve.empty());
  // The toy documents all follow one template, so held-out accuracy also
  // converges.
  CHECK(in_sample_s(model, dev_set) >= 95.0);
}

TEST_CASE("parser: window tagger memorizes token-cued labels") {
  // The first token of each EDU determines its label.
  auto dep_doc = [](const std::string& id, std::vector<std::string> firsts) {
    DepDocument d;
    d.doc_id = id;
    for (std::size_t i = 0; i < firsts.size(); ++i) {
      Edu e;
      e.index = static_cast<int>(i + 1);
      e.text = firsts[i] + " tail";
      d.edus.push_back(e);
      d.heads.push_back(i == 0 ? 0 : 1);
      d.labels.push_back(firsts[i] == "open" ? "elaboration" : "joint");
    }
    return d;
  };
  const DepDocument a = dep_doc("a", {"open", "close", "open", "close"});
  const DepDocument b = dep_doc("b", {"open", "open", "close", "open"});

  TaggerConfig config;
  config.epochs = 10;
  const Tagger tagger = train_window_tagger({&a, &b}, config);
  CHECK(tagger.labels.size() == 2);
  CHECK(tagger.majority == "elaboration");  // five of eight examples

  CHECK(tag(tagger, a.edus) == a.labels);
  CHECK(tag(tagger, b.edus) == b.labels);

  SUBCASE("unseen text still receives a prediction") {
    std::vector<Edu> fresh(2);
    fresh[0] = {1, "open something new", {}, {}};
    fresh[1] = {2, "close it again", {}, {}};
    const std::vector<std::string> out = tag(tagger, fresh);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == "elaboration");
    CHECK(out[1] == "joint");
  }
}

TEST_CASE("parser: untrained tagger falls back on the majority label") {
  DepDocument d;
  d.edus = ts::make_edus(3);
  d.heads = {0, 1, 1};
  d.labels = {"root", "joint", "joint"};
  TaggerConfig config;
  config.epochs = 0;  // no updates, so every weight stays zero
  const Tagger tagger = train_window_tagger({&d}, config);
  CHECK(tagger.majority == "joint");
  const std::vector<std::string> out = tag(tagger, d.edus);
  for (const auto& label : out) CHECK(label == "joint");
}

TEST_CASE("parser: tagger requires documents") {
  TS_THROWS_CODE(train_window_tagger({}, TaggerConfig{}), Errc::empty_train_set);
}

TEST_CASE("parser: stacked annotations from a base parser") {
  const Corpus corpus = ts::toy_corpus();
  const std::vector<BinaryTree> golds = binarized_docs(corpus);
  TrainConfig config;
  config.seed = 7;
  const Model base = train(as_train_docs(golds), {}, config);

  const BinaryTree& doc = golds.front();
  SUBCASE("label mode fills dependency labels") {
    const DocAnnotations ann =
        stack_features_from_parser(base, doc.edus, StackingMode::label, doc.doc_id);
    REQUIRE(ann.size() == doc.edus.size());
    int roots = 0;
    for (const auto& a : ann) {
      CHECK_FALSE(a.dep_label.empty());
      if (a.dep_label == kRootLabel) ++roots;
    }
    CHECK(roots == 1);
  }
  SUBCASE("graph mode fills direction and distance") {
    const DocAnnotations ann =
        stack_features_from_parser(base, doc.edus, StackingMode::graph, doc.doc_id);
    REQUIRE(ann.size() == doc.edus.size());
    int roots = 0;
    for (const auto& a : ann) {
      CHECK_FALSE(a.dep_direction.empty());
      CHECK_FALSE(a.dep_distance.empty());
      if (a.dep_direction == "root") ++roots;
    }
    CHECK(roots == 1);
  }
}
