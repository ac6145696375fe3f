#include "rstlab/parser.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "rstlab/depconv.hpp"
#include "rstlab/errors.hpp"
#include "rstlab/metrics.hpp"
#include "rstlab/strutil.hpp"

namespace rstlab {
namespace {

// Splitmix-style generator; std::shuffle is implementation-defined, so the
// shuffles below are hand-rolled for cross-platform reproducibility.
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

template <typename T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::string len_bucket(std::size_t n) {
  if (n <= 1) return "1";
  if (n <= 3) return "2-3";
  if (n <= 7) return "4-7";
  if (n <= 15) return "8-15";
  if (n <= 31) return "16-31";
  return "32+";
}

struct EduView {
  std::string first_tok, last_tok;
  std::size_t tokens = 0;
};

EduView view_of(const Edu& e) {
  EduView v;
  const std::vector<std::string> toks = split_ws(e.text);
  v.tokens = toks.size();
  if (!toks.empty()) {
    v.first_tok = lower(toks.front());
    v.last_tok = lower(toks.back());
  }
  return v;
}

}  // namespace

std::string Transition::key() const {
  if (shift) return "shift";
  return std::string("reduce ") + category_name(cat) + " " + label;
}

int Model::action_id(const Transition& t) const {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == t) return static_cast<int>(i);
  return -1;
}

std::uint64_t FeatureConfig::fingerprint() const {
  std::string desc = "v1;org=";
  desc += organizational ? '1' : '0';
  desc += ";stacking=";
  switch (stacking) {
    case StackingMode::none: desc += "none"; break;
    case StackingMode::label: desc += "label"; break;
    case StackingMode::graph: desc += "graph"; break;
  }
  return fnv1a(desc);
}

// ---------------------------------------------------------------------------
// Transition system

namespace {

void apply_transition(ParserState& state, const Transition& t) {
  if (t.shift) {
    if (!state.can_shift())
      throw Error(Errc::illegal_transition, "shift with an empty queue");
    state.stack.push_back(make_binary_leaf(state.next_edu++));
    return;
  }
  if (!state.can_reduce())
    throw Error(Errc::illegal_transition, "reduce with fewer than two spans");
  BinaryNode right = std::move(state.stack.back());
  state.stack.pop_back();
  BinaryNode left = std::move(state.stack.back());
  state.stack.pop_back();
  state.stack.push_back(make_binary_node(t.cat, t.label, std::move(left), std::move(right)));
}

}  // namespace

std::vector<Transition> oracle(const BinaryTree& gold) {
  // span -> (left child's last EDU, category, label)
  std::map<std::pair<int, int>, std::pair<int, Transition>> nodes;
  struct Walk {
    static void run(const BinaryNode& n,
                    std::map<std::pair<int, int>, std::pair<int, Transition>>& nodes) {
      if (n.leaf) return;
      Transition t;
      t.shift = false;
      t.cat = n.cat;
      t.label = n.label;
      nodes[{n.first, n.last}] = {n.left().last, t};
      for (const auto& c : n.children) run(c, nodes);
    }
  };
  Walk::run(gold.root, nodes);

  ParserState state;
  state.edu_count = static_cast<int>(gold.edus.size());
  std::vector<Transition> seq;
  while (!state.terminal()) {
    bool reduced = false;
    if (state.can_reduce()) {
      const BinaryNode& s1 = state.stack[state.stack.size() - 2];
      const BinaryNode& s0 = state.stack.back();
      auto it = nodes.find({s1.first, s0.last});
      if (it != nodes.end() && it->second.first == s1.last) {
        apply_transition(state, it->second.second);
        seq.push_back(it->second.second);
        reduced = true;
      }
    }
    if (reduced) continue;
    if (!state.can_shift())
      throw Error(Errc::illegal_transition, gold.doc_id + ": oracle stuck (tree not derivable)");
    Transition shift;
    apply_transition(state, shift);
    seq.push_back(shift);
  }
  return seq;
}

BinaryTree replay(const std::vector<Edu>& edus, const std::vector<Transition>& seq) {
  ParserState state;
  state.edu_count = static_cast<int>(edus.size());
  for (const auto& t : seq) apply_transition(state, t);
  if (!state.terminal())
    throw Error(Errc::non_terminal_end, "stack " + std::to_string(state.stack.size()) +
                                            ", queue at " + std::to_string(state.next_edu));
  BinaryTree tree;
  tree.edus = edus;
  tree.root = std::move(state.stack.front());
  return tree;
}

// ---------------------------------------------------------------------------
// Features

std::vector<std::string> extract_features(const ParserState& state, const std::vector<Edu>& edus,
                                          const DocAnnotations& annotations,
                                          const FeatureConfig& config) {
  std::vector<std::string> out;
  const BinaryNode* s0 = state.stack.empty() ? nullptr : &state.stack.back();
  const BinaryNode* s1 = state.stack.size() < 2 ? nullptr : &state.stack[state.stack.size() - 2];
  const int q0 = state.queue_empty() ? 0 : state.next_edu;

  auto span_tokens = [&](int first, int last) {
    std::size_t n = 0;
    for (int i = first; i <= last; ++i) n += count_tokens(edus[i - 1].text);
    return n;
  };
  struct Slot {
    std::string first_tok, last_tok;
    bool present = false;
  };
  auto fill = [&](const char* name, int first, int last, Slot& slot) {
    slot.present = true;
    EduView head = view_of(edus[first - 1]);
    EduView tail = (last == first) ? head : view_of(edus[last - 1]);
    slot.first_tok = head.first_tok;
    slot.last_tok = tail.last_tok;
    out.push_back(std::string(name) + "_first=" + slot.first_tok);
    out.push_back(std::string(name) + "_last=" + slot.last_tok);
    out.push_back(std::string(name) + "_len=" + len_bucket(span_tokens(first, last)));
  };

  Slot vs0, vs1, vq0;
  if (s0) fill("s0", s0->first, s0->last, vs0);
  if (s1) fill("s1", s1->first, s1->last, vs1);
  if (q0) fill("q0", q0, q0, vq0);

  if (vs0.present && vs1.present) {
    out.push_back("s0f+s1f=" + vs0.first_tok + "|" + vs1.first_tok);
    out.push_back("s0l+s1l=" + vs0.last_tok + "|" + vs1.last_tok);
  }
  if (vs0.present && vq0.present) {
    out.push_back("s0f+q0f=" + vs0.first_tok + "|" + vq0.first_tok);
    out.push_back("s0l+q0f=" + vs0.last_tok + "|" + vq0.first_tok);
  }
  if (vs1.present && vq0.present) out.push_back("s1f+q0f=" + vs1.first_tok + "|" + vq0.first_tok);

  if (config.organizational) {
    auto sent = [&](int edu) { return edus[edu - 1].sentence_id; };
    auto para = [&](int edu) { return edus[edu - 1].paragraph_id; };
    auto pair_feature = [&](const char* name, std::optional<int> a, std::optional<int> b) {
      if (a && b) out.push_back(std::string(name) + (*a == *b ? "=same" : "=diff"));
    };
    if (s0 && s1) {
      pair_feature("org_s0s1_sent", sent(s1->last), sent(s0->first));
      pair_feature("org_s0s1_para", para(s1->last), para(s0->first));
    }
    if (s0 && q0) {
      pair_feature("org_s0q0_sent", sent(s0->last), sent(q0));
      pair_feature("org_s0q0_para", para(s0->last), para(q0));
    }
    auto starts_para = [&](const char* name, int edu) {
      if (!para(edu)) return;
      if (edu == 1 || (para(edu - 1) && *para(edu - 1) != *para(edu)))
        out.push_back(std::string(name) + "_starts_para");
    };
    if (s0) starts_para("org_s0", s0->first);
    if (q0) starts_para("org_q0", q0);
  }

  if (config.stacking != StackingMode::none && !annotations.empty()) {
    auto ann_feature = [&](const char* name, int edu) {
      const EduAnnotation& a = annotations[edu - 1];
      if (config.stacking == StackingMode::label) {
        if (!a.dep_label.empty()) out.push_back(std::string(name) + "_deplab=" + a.dep_label);
        return;
      }
      if (!a.dep_direction.empty())
        out.push_back(std::string(name) + "_depdir=" + a.dep_direction);
      if (!a.dep_distance.empty())
        out.push_back(std::string(name) + "_depdist=" + a.dep_distance);
      if (!a.dep_direction.empty() && !a.dep_distance.empty())
        out.push_back(std::string(name) + "_depdirdist=" + a.dep_direction + "|" + a.dep_distance);
    };
    if (s0) ann_feature("s0", s0->first);
    if (s1) ann_feature("s1", s1->first);
    if (q0) ann_feature("q0", q0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Learner

namespace {

// Lazily averaged perceptron cells: raw weight, accumulated sum, and the
// step at which the cell was last touched.
struct Row {
  std::vector<double> w, acc;
  std::vector<long long> at;
  explicit Row(std::size_t k) : w(k, 0.0), acc(k, 0.0), at(k, 0) {}
};

struct Learner {
  std::size_t k;  // action count
  std::unordered_map<std::string, Row> rows;
  long long step = 0;

  explicit Learner(std::size_t actions) : k(actions) {}

  void bump(const std::string& feature, std::size_t action, double delta) {
    auto it = rows.find(feature);
    if (it == rows.end()) it = rows.emplace(feature, Row(k)).first;
    Row& r = it->second;
    r.acc[action] += r.w[action] * static_cast<double>(step - r.at[action]);
    r.at[action] = step;
    r.w[action] += delta;
  }

  void score(const std::vector<std::string>& features, std::vector<double>& scores) const {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (const auto& f : features) {
      auto it = rows.find(f);
      if (it == rows.end()) continue;
      const Row& r = it->second;
      for (std::size_t a = 0; a < k; ++a) scores[a] += r.w[a];
    }
  }

  std::unordered_map<std::string, std::vector<double>> averaged() const {
    std::unordered_map<std::string, std::vector<double>> out;
    const double t = static_cast<double>(std::max<long long>(step, 1));
    out.reserve(rows.size());
    for (const auto& [feature, r] : rows) {
      std::vector<double> avg(k, 0.0);
      bool live = false;
      for (std::size_t a = 0; a < k; ++a) {
        const double total = r.acc[a] + r.w[a] * static_cast<double>(step - r.at[a]);
        avg[a] = total / t;
        if (avg[a] != 0.0) live = true;
      }
      if (live) out.emplace(feature, std::move(avg));
    }
    return out;
  }
};

int argmax_legal(const std::vector<double>& scores, const std::vector<Transition>& actions,
                 const ParserState& state) {
  int best = -1;
  for (std::size_t a = 0; a < actions.size(); ++a) {
    const bool legal = actions[a].shift ? state.can_shift() : state.can_reduce();
    if (!legal) continue;
    if (best < 0 || scores[a] > scores[best]) best = static_cast<int>(a);
  }
  return best;
}

struct PreparedDoc {
  const TrainDoc* doc;
  std::vector<Transition> gold_seq;
  std::vector<int> gold_ids;
};

double dev_micro_s(const Model& model, const std::vector<TrainDoc>& dev) {
  ParsevalCounts pooled;
  for (const auto& d : dev) {
    const BinaryTree parsed =
        parse(model, d.gold->edus, d.annotations, d.gold->doc_id, d.gold->genre);
    pooled += parseval(*d.gold, parsed);
  }
  return triple_from(pooled).s;
}

Model train_impl(const Model* pretrained, const std::vector<TrainDoc>& train_docs,
                 const std::vector<TrainDoc>& dev_docs, const TrainConfig& config) {
  if (train_docs.empty()) throw Error(Errc::empty_train_set, "no training documents");

  std::vector<PreparedDoc> prepared(train_docs.size());
  std::vector<Transition> actions;
  std::map<std::string, int> ids;
  auto intern = [&](const Transition& t, bool allow_new) {
    auto it = ids.find(t.key());
    if (it != ids.end()) return it->second;
    if (!allow_new)
      throw Error(Errc::inventory_mismatch, "training data introduces action " + t.key());
    const int id = static_cast<int>(actions.size());
    ids.emplace(t.key(), id);
    actions.push_back(t);
    return id;
  };
  const bool extend = pretrained == nullptr;
  if (pretrained) {
    actions = pretrained->actions;
    for (std::size_t i = 0; i < actions.size(); ++i) ids.emplace(actions[i].key(), i);
  } else {
    intern(Transition{}, true);  // shift is always action 0
  }
  for (std::size_t i = 0; i < train_docs.size(); ++i) {
    prepared[i].doc = &train_docs[i];
    prepared[i].gold_seq = oracle(*train_docs[i].gold);
    for (const auto& t : prepared[i].gold_seq)
      prepared[i].gold_ids.push_back(intern(t, extend));
  }

  Learner learner(actions.size());
  if (pretrained) {
    for (const auto& [feature, row] : pretrained->weights) {
      Row r(actions.size());
      r.w = row;
      learner.rows.emplace(feature, std::move(r));
    }
  }

  Rng rng(config.seed);
  std::vector<std::size_t> order(prepared.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Model best;
  best.config = config.features;
  best.actions = actions;
  double best_s = -1.0;
  int best_epoch = 0;
  std::vector<double> scores(actions.size());

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    fisher_yates(order, rng);
    for (std::size_t oi : order) {
      const PreparedDoc& p = prepared[oi];
      ParserState state;
      state.edu_count = static_cast<int>(p.doc->gold->edus.size());
      for (std::size_t si = 0; si < p.gold_seq.size(); ++si) {
        ++learner.step;
        const std::vector<std::string> feats =
            extract_features(state, p.doc->gold->edus, p.doc->annotations, config.features);
        learner.score(feats, scores);
        const int predicted = argmax_legal(scores, actions, state);
        const int gold = p.gold_ids[si];
        if (predicted != gold) {
          for (const auto& f : feats) {
            learner.bump(f, static_cast<std::size_t>(gold), 1.0);
            if (predicted >= 0) learner.bump(f, static_cast<std::size_t>(predicted), -1.0);
          }
        }
        apply_transition(state, p.gold_seq[si]);
      }
    }

    Model snapshot;
    snapshot.config = config.features;
    snapshot.actions = actions;
    snapshot.weights = learner.averaged();
    const std::vector<TrainDoc>& dev = dev_docs.empty() ? train_docs : dev_docs;
    const double s = dev_micro_s(snapshot, dev);
    if (config.epoch_dev_s) config.epoch_dev_s->push_back({epoch, s});
    if (s > best_s) {
      best_s = s;
      best_epoch = epoch;
      best.weights = std::move(snapshot.weights);
    }
    if (s >= 100.0 - 1e-9) break;
    if (epoch - best_epoch >= config.patience) break;
  }
  return best;
}

}  // namespace

Model train(const std::vector<TrainDoc>& train_docs, const std::vector<TrainDoc>& dev_docs,
            const TrainConfig& config) {
  return train_impl(nullptr, train_docs, dev_docs, config);
}

Model warm_start(const Model& pretrained, const std::vector<TrainDoc>& train_docs,
                 const std::vector<TrainDoc>& dev_docs, const TrainConfig& config) {
  if (pretrained.empty()) return train_impl(nullptr, train_docs, dev_docs, config);
  if (pretrained.config.fingerprint() != config.features.fingerprint())
    throw Error(Errc::model_hash_mismatch, "pretrained model uses a different feature config");
  return train_impl(&pretrained, train_docs, dev_docs, config);
}

BinaryTree parse(const Model& model, const std::vector<Edu>& edus,
                 const DocAnnotations& annotations, const std::string& doc_id,
                 const std::string& genre) {
  if (model.empty()) throw Error(Errc::empty_train_set, "parse called with an untrained model");
  if (edus.empty()) throw Error(Errc::empty_input, doc_id + ": no EDUs to parse");
  ParserState state;
  state.edu_count = static_cast<int>(edus.size());
  std::vector<double> scores(model.actions.size());
  while (!state.terminal()) {
    const std::vector<std::string> feats =
        extract_features(state, edus, annotations, model.config);
    std::fill(scores.begin(), scores.end(), 0.0);
    for (const auto& f : feats) {
      auto it = model.weights.find(f);
      if (it == model.weights.end()) continue;
      for (std::size_t a = 0; a < scores.size(); ++a) scores[a] += it->second[a];
    }
    const int a = argmax_legal(scores, model.actions, state);
    if (a < 0) throw Error(Errc::illegal_transition, doc_id + ": no legal action");
    apply_transition(state, model.actions[static_cast<std::size_t>(a)]);
  }
  BinaryTree tree;
  tree.doc_id = doc_id;
  tree.genre = genre;
  tree.edus = edus;
  tree.root = std::move(state.stack.front());
  return tree;
}

// ---------------------------------------------------------------------------
// Model persistence

std::string serialize_model(const Model& m) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "rstlab-model 1\n";
  out << "fingerprint " << std::hex << m.config.fingerprint() << std::dec << "\n";
  out << "actions " << m.actions.size() << "\n";
  for (const auto& a : m.actions) out << a.key() << "\n";
  std::vector<const std::string*> keys;
  keys.reserve(m.weights.size());
  for (const auto& [feature, row] : m.weights) keys.push_back(&feature);
  std::sort(keys.begin(), keys.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  out << "features " << keys.size() << "\n";
  for (const std::string* f : keys) {
    out << *f;
    for (double w : m.weights.at(*f)) out << '\t' << w;
    out << "\n";
  }
  return out.str();
}

Model deserialize_model(const std::string& text, const FeatureConfig& expected) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line))
      throw Error(Errc::io_error, "truncated model file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next_line() != "rstlab-model 1")
    throw Error(Errc::io_error, "not a model file");
  std::istringstream fp(next_line());
  std::string word;
  std::uint64_t hash = 0;
  fp >> word >> std::hex >> hash;
  if (word != "fingerprint" || hash != expected.fingerprint())
    throw Error(Errc::model_hash_mismatch, "model was trained with a different feature config");

  Model m;
  m.config = expected;
  std::istringstream ah(next_line());
  std::size_t n_actions = 0;
  ah >> word >> n_actions;
  if (word != "actions") throw Error(Errc::io_error, "bad actions header");
  for (std::size_t i = 0; i < n_actions; ++i) {
    const std::string l = next_line();
    Transition t;
    if (l == "shift") {
      m.actions.push_back(t);
      continue;
    }
    std::istringstream ls(l);
    std::string op, cat;
    ls >> op >> cat >> t.label;
    if (op != "reduce" || t.label.empty())
      throw Error(Errc::io_error, "bad action line: " + l);
    t.shift = false;
    if (cat == "NS")
      t.cat = Category::NS;
    else if (cat == "SN")
      t.cat = Category::SN;
    else if (cat == "NN")
      t.cat = Category::NN;
    else
      throw Error(Errc::io_error, "bad category: " + cat);
    m.actions.push_back(t);
  }
  std::istringstream fh(next_line());
  std::size_t n_features = 0;
  fh >> word >> n_features;
  if (word != "features") throw Error(Errc::io_error, "bad features header");
  for (std::size_t i = 0; i < n_features; ++i) {
    const std::string l = next_line();
    const std::vector<std::string> cols = split_char(l, '\t');
    if (cols.size() != n_actions + 1)
      throw Error(Errc::io_error, "bad weight row: " + l);
    std::vector<double> row(n_actions);
    for (std::size_t a = 0; a < n_actions; ++a) row[a] = std::stod(cols[a + 1]);
    m.weights.emplace(cols[0], std::move(row));
  }
  return m;
}

void save_model(const Model& m, const std::string& path) {
  write_file(path, serialize_model(m));
}

Model load_model(const std::string& path, const FeatureConfig& expected) {
  return deserialize_model(read_file(path), expected);
}

Model load_model_auto(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (!std::getline(in, line)) throw Error(Errc::io_error, "truncated model file");
  std::istringstream fp(line);
  std::string word;
  std::uint64_t hash = 0;
  fp >> word >> std::hex >> hash;
  if (word != "fingerprint") throw Error(Errc::io_error, "not a model file");
  for (bool org : {true, false})
    for (StackingMode mode : {StackingMode::none, StackingMode::label, StackingMode::graph}) {
      FeatureConfig candidate{org, mode};
      if (candidate.fingerprint() == hash) return deserialize_model(text, candidate);
    }
  throw Error(Errc::model_hash_mismatch, "model fingerprint matches no known feature config");
}

// ---------------------------------------------------------------------------
// Window tagger

namespace {

std::vector<std::string> window_features(const std::vector<Edu>& edus, int i) {
  std::vector<std::string> out;
  out.push_back("bias");
  const int n = static_cast<int>(edus.size());
  const EduView cur = view_of(edus[i - 1]);
  out.push_back("cur_first=" + cur.first_tok);
  out.push_back("cur_last=" + cur.last_tok);
  out.push_back("cur_len=" + len_bucket(cur.tokens));
  for (const auto& tok : split_ws(edus[i - 1].text)) out.push_back("cur_tok=" + lower(tok));
  std::string prev_last = "<bos>", next_first = "<eos>";
  if (i > 1) {
    const EduView prev = view_of(edus[i - 2]);
    prev_last = prev.last_tok;
    out.push_back("prev_first=" + prev.first_tok);
    out.push_back("prev_last=" + prev.last_tok);
  } else {
    out.push_back("bos");
  }
  if (i < n) {
    const EduView next = view_of(edus[i]);
    next_first = next.first_tok;
    out.push_back("next_first=" + next.first_tok);
    out.push_back("next_last=" + next.last_tok);
  } else {
    out.push_back("eos");
  }
  out.push_back("prevlast+curfirst=" + prev_last + "|" + cur.first_tok);
  out.push_back("curlast+nextfirst=" + cur.last_tok + "|" + next_first);
  return out;
}

}  // namespace

Tagger train_window_tagger(const std::vector<const DepDocument*>& train,
                           const TaggerConfig& config) {
  if (train.empty()) throw Error(Errc::empty_train_set, "no tagger training documents");

  Tagger tagger;
  std::map<std::string, int> label_ids;
  std::map<std::string, long long> label_counts;
  struct Example {
    const DepDocument* doc;
    int edu;
    int label;
  };
  std::vector<Example> examples;
  for (const DepDocument* d : train) {
    for (int i = 1; i <= d->size(); ++i) {
      const std::string& label = d->labels[i - 1];
      auto it = label_ids.find(label);
      if (it == label_ids.end()) {
        it = label_ids.emplace(label, static_cast<int>(tagger.labels.size())).first;
        tagger.labels.push_back(label);
      }
      ++label_counts[label];
      examples.push_back({d, i, it->second});
    }
  }
  for (const auto& [label, count] : label_counts)
    if (tagger.majority.empty() || count > label_counts[tagger.majority]) tagger.majority = label;

  Learner learner(tagger.labels.size());
  Rng rng(config.seed);
  std::vector<double> scores(tagger.labels.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    fisher_yates(examples, rng);
    for (const Example& ex : examples) {
      ++learner.step;
      const std::vector<std::string> feats = window_features(ex.doc->edus, ex.edu);
      learner.score(feats, scores);
      int predicted = 0;
      for (std::size_t a = 1; a < scores.size(); ++a)
        if (scores[a] > scores[predicted]) predicted = static_cast<int>(a);
      if (predicted != ex.label) {
        for (const auto& f : feats) {
          learner.bump(f, static_cast<std::size_t>(ex.label), 1.0);
          learner.bump(f, static_cast<std::size_t>(predicted), -1.0);
        }
      }
    }
  }
  tagger.weights = learner.averaged();
  return tagger;
}

std::vector<std::string> tag(const Tagger& tagger, const std::vector<Edu>& edus) {
  std::vector<std::string> out;
  out.reserve(edus.size());
  std::vector<double> scores(tagger.labels.size());
  for (int i = 1; i <= static_cast<int>(edus.size()); ++i) {
    std::fill(scores.begin(), scores.end(), 0.0);
    bool hit = false;
    for (const auto& f : window_features(edus, i)) {
      auto it = tagger.weights.find(f);
      if (it == tagger.weights.end()) continue;
      hit = true;
      for (std::size_t a = 0; a < scores.size(); ++a) scores[a] += it->second[a];
    }
    if (!hit) {
      out.push_back(tagger.majority);
      continue;
    }
    std::size_t best = 0;
    for (std::size_t a = 1; a < scores.size(); ++a)
      if (scores[a] > scores[best]) best = a;
    out.push_back(tagger.labels[best]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stacking annotations

std::string distance_bucket(int distance) {
  if (distance <= 0) return "0";
  if (distance == 1) return "1";
  if (distance == 2) return "2";
  if (distance <= 5) return "3-5";
  if (distance <= 10) return "6-10";
  return ">10";
}

DocAnnotations annotations_from_dependencies(const DepDocument& doc, StackingMode mode) {
  DocAnnotations out(doc.edus.size());
  for (int i = 0; i < doc.size(); ++i) {
    if (mode == StackingMode::label) {
      out[i].dep_label = doc.labels[i];
      continue;
    }
    if (mode != StackingMode::graph) continue;
    const int head = doc.heads[i];
    if (head == 0) {
      out[i].dep_direction = "root";
      out[i].dep_distance = "0";
    } else {
      out[i].dep_direction = head < i + 1 ? "left" : "right";
      out[i].dep_distance = distance_bucket(std::abs(head - (i + 1)));
    }
  }
  return out;
}

DocAnnotations stack_features_from_parser(const Model& base_model, const std::vector<Edu>& edus,
                                          StackingMode mode, const std::string& doc_id) {
  const BinaryTree parsed = parse(base_model, edus, {}, doc_id);
  return annotations_from_dependencies(to_dependencies(parsed), mode);
}

}  // namespace rstlab
