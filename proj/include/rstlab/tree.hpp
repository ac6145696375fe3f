#ifndef RSTLAB_TREE_HPP
#define RSTLAB_TREE_HPP

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rstlab {

// Elementary discourse unit. Indices are 1-based and contiguous within a
// document; text is whitespace-normalized and non-empty.
struct Edu {
  int index = 0;
  std::string text;
  std::optional<int> sentence_id;
  std::optional<int> paragraph_id;

  bool operator==(const Edu&) const = default;
};

enum class Role { nucleus, satellite };
enum class RelKind { rst, multinuc };
enum class NodeKind { leaf, span, multinuc };

// Label carried by the nucleus edge of a span node. Not a relation.
inline const std::string kSpanLabel = "span";
inline const std::string kRootLabel = "root";
// Pseudo-relation stitching discontinuous EDUs; excluded from relation
// instance counts and the nuclearity distribution.
inline const std::string kSameUnitLabel = "same-unit";

struct RelationInventory {
  std::set<std::pair<std::string, RelKind>> entries;

  bool has(const std::string& name, RelKind kind) const {
    return entries.count({name, kind}) != 0;
  }
  bool known(const std::string& name) const {
    return has(name, RelKind::rst) || has(name, RelKind::multinuc);
  }
  void add(const std::string& name, RelKind kind) { entries.insert({name, kind}); }
  bool empty() const { return entries.empty(); }

  bool operator==(const RelationInventory&) const = default;
};

// Node of an n-ary constituent tree. `role` and `label` describe the edge to
// the parent: satellites carry their rst relation, multinuc children the
// shared multinuclear relation, and the nucleus under a span node carries
// the constant "span". The root carries "root".
//
// Trees produced by the rs3 reader are in normal form: every span node has
// exactly one nucleus and one satellite child (multiple satellites of one
// nucleus are nested closest-first, distance ties attaching the left
// satellite innermost), and no multinuc node has a bare multinuc child with
// the same label. Hand-built trees may be non-normal; binarize() accepts
// them, and debinarize(binarize(t)) yields the normal form.
struct NaryNode {
  NodeKind kind = NodeKind::leaf;
  Role role = Role::nucleus;
  std::string label = kRootLabel;
  int edu = 0;  // leaf only
  int first = 0, last = 0;
  std::vector<NaryNode> children;

  bool is_leaf() const { return kind == NodeKind::leaf; }
};

struct ConstituentTree {
  std::string doc_id;
  std::string genre;
  std::vector<Edu> edus;
  RelationInventory inventory;
  NaryNode root;
};

enum class Category { NS, SN, NN };

const char* category_name(Category c);

// Strictly binary node. For NS/SN the label is the satellite's relation,
// for NN the shared multinuclear relation.
struct BinaryNode {
  bool leaf = true;
  int edu = 0;
  Category cat = Category::NS;
  std::string label;
  int first = 0, last = 0;
  std::vector<BinaryNode> children;  // empty or exactly two

  const BinaryNode& left() const { return children[0]; }
  const BinaryNode& right() const { return children[1]; }
};

struct BinaryTree {
  std::string doc_id;
  std::string genre;
  std::vector<Edu> edus;
  RelationInventory inventory;
  BinaryNode root;
};

BinaryNode make_binary_leaf(int edu);
BinaryNode make_binary_node(Category cat, std::string label, BinaryNode left, BinaryNode right);

// Recomputes first/last spans bottom-up from the leaves.
void assign_spans(NaryNode& node);
void assign_spans(BinaryNode& node);

int leaf_count(const NaryNode& node);
int leaf_count(const BinaryNode& node);
int internal_count(const BinaryNode& node);

// Structural equality on spans, roles, labels and leaf indices; EDU texts
// are compared at tree level. Sentence/paragraph ids are sidecar data and
// do not participate.
bool structurally_equal(const NaryNode& a, const NaryNode& b);
bool structurally_equal(const ConstituentTree& a, const ConstituentTree& b);
bool structurally_equal(const BinaryNode& a, const BinaryNode& b);
bool structurally_equal(const BinaryTree& a, const BinaryTree& b);

// Throws on violated invariants (leaf coverage, role/arity constraints,
// labels missing from the inventory).
void validate(const ConstituentTree& tree);

}  // namespace rstlab

#endif
