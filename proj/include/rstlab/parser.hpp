#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "rstlab/rsd.hpp"
#include "rstlab/tree.hpp"

namespace rstlab {

// Shift-reduce transition. Reduce pops the top two spans and attaches them
// under a new node with the given category and label.
struct Transition {
  bool shift = true;
  Category cat = Category::NS;
  std::string label;

  bool operator==(const Transition&) const = default;
  std::string key() const;  // stable textual form, also used in model files
};

struct ParserState {
  std::vector<BinaryNode> stack;
  int next_edu = 1;  // queue front; EDUs next_edu..n remain
  int edu_count = 0;

  bool queue_empty() const { return next_edu > edu_count; }
  bool can_shift() const { return !queue_empty(); }
  bool can_reduce() const { return stack.size() >= 2; }
  bool terminal() const { return queue_empty() && stack.size() == 1; }
};

// Gold derivation: Reduce whenever the top two stack spans are siblings in
// the gold tree, otherwise Shift. Always 2n-1 transitions for n EDUs.
std::vector<Transition> oracle(const BinaryTree& gold);

// Runs a transition sequence over the EDUs and returns the resulting tree.
// Throws IllegalTransition when a step's precondition fails and
// NonTerminalEnd when the sequence stops early.
BinaryTree replay(const std::vector<Edu>& edus, const std::vector<Transition>& seq);

// Optional per-EDU stacking annotations; empty strings contribute nothing.
struct EduAnnotation {
  std::string dep_label;
  std::string dep_direction;  // left | right | root
  std::string dep_distance;   // 0 | 1 | 2 | 3-5 | 6-10 | >10
};
using DocAnnotations = std::vector<EduAnnotation>;

enum class StackingMode { none, label, graph };

struct FeatureConfig {
  bool organizational = true;
  StackingMode stacking = StackingMode::none;

  std::uint64_t fingerprint() const;
};

// Sparse binary features over the top two stack spans and the queue front.
// Absent information (empty stack slots, missing sidecar ids, missing
// annotations) simply yields no feature.
std::vector<std::string> extract_features(const ParserState& state, const std::vector<Edu>& edus,
                                          const DocAnnotations& annotations,
                                          const FeatureConfig& config);

struct Model {
  FeatureConfig config;
  std::vector<Transition> actions;                          // id order fixed at training time
  std::unordered_map<std::string, std::vector<double>> weights;  // averaged; feature -> per-action

  bool empty() const { return actions.empty(); }
  int action_id(const Transition& t) const;  // -1 when absent
};

std::string serialize_model(const Model& m);
Model deserialize_model(const std::string& text, const FeatureConfig& expected);
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path, const FeatureConfig& expected);
// Recovers the feature config from the stored fingerprint.
Model load_model_auto(const std::string& path);

struct TrainDoc {
  const BinaryTree* gold = nullptr;
  DocAnnotations annotations;  // empty when the regime adds none
};

struct TrainConfig {
  FeatureConfig features;
  int max_epochs = 20;
  int patience = 5;
  std::uint64_t seed = 1;
  bool quiet = true;
  std::vector<std::pair<int, double>>* epoch_dev_s = nullptr;  // filled when set
};

// Averaged-perceptron training over teacher-forced oracle states, early
// stopping on dev micro-S. Deterministic for a fixed seed.
Model train(const std::vector<TrainDoc>& train_docs, const std::vector<TrainDoc>& dev_docs,
            const TrainConfig& config);

// Continues training from a pretrained model's weights. The training data
// may not introduce actions unknown to the pretrained inventory. An empty
// pretrained model degenerates to train().
Model warm_start(const Model& pretrained, const std::vector<TrainDoc>& train_docs,
                 const std::vector<TrainDoc>& dev_docs, const TrainConfig& config);

// Greedy decoding with illegal actions masked and forced moves at the
// boundaries; score ties pick the smallest action id.
BinaryTree parse(const Model& model, const std::vector<Edu>& edus,
                 const DocAnnotations& annotations, const std::string& doc_id = "",
                 const std::string& genre = "");

// Three-EDU-window classifier predicting the middle EDU's dependency label.
struct Tagger {
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::vector<double>> weights;
  std::string majority;
};

struct TaggerConfig {
  int epochs = 5;
  std::uint64_t seed = 1;
};

Tagger train_window_tagger(const std::vector<const DepDocument*>& train,
                           const TaggerConfig& config = {});
std::vector<std::string> tag(const Tagger& tagger, const std::vector<Edu>& edus);

// Per-EDU annotations from a base parser's own output on each document:
// label mode records the predicted dependency label, graph mode the
// attachment direction and bucketized distance to the predicted head.
DocAnnotations annotations_from_dependencies(const DepDocument& doc, StackingMode mode);
DocAnnotations stack_features_from_parser(const Model& base_model, const std::vector<Edu>& edus,
                                          StackingMode mode, const std::string& doc_id = "");

std::string distance_bucket(int distance);

}  // namespace rstlab
