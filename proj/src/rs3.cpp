#include "rstlab/rs3.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "rstlab/errors.hpp"
#include "rstlab/strutil.hpp"

namespace rstlab {
namespace {

namespace pt = boost::property_tree;

struct RawNode {
  std::string id;
  bool segment = false;
  bool multinuc_group = false;
  std::string parent;
  std::string relname;
  std::string text;
  int edu = 0;
  std::vector<RawNode*> children;
};

enum class Attach { span_child, multinuc_child, satellite };

struct Parser {
  const std::string& doc_id;
  const Rs3Options& opts;
  RelationInventory inventory;
  std::map<std::string, RawNode> nodes;
  std::vector<RawNode*> segments_in_order;
  int visited = 0;

  [[noreturn]] void fail(Errc code, const std::string& detail) const {
    throw Error(code, doc_id + ": " + detail);
  }

  Attach classify(const RawNode& child, const RawNode& parent) const {
    if (child.relname.empty()) fail(Errc::malformed_xml, "node " + child.id + " has a parent but no relname");
    if (child.relname == kSpanLabel) {
      if (parent.segment || parent.multinuc_group)
        fail(Errc::malformed_xml, "span link into non-span node " + parent.id);
      return Attach::span_child;
    }
    const bool as_multinuc = inventory.has(child.relname, RelKind::multinuc);
    const bool as_rst = inventory.has(child.relname, RelKind::rst);
    if (!parent.segment && parent.multinuc_group && as_multinuc) return Attach::multinuc_child;
    if (as_rst) return Attach::satellite;
    if (as_multinuc)
      fail(Errc::malformed_xml, "multinuc relation " + child.relname + " outside a multinuc group");
    fail(Errc::unknown_relation, child.relname);
  }

  // Nests satellites closest to the nucleus span first; a left satellite
  // binds inside a right one at equal distance.
  NaryNode wrap(NaryNode core, std::vector<NaryNode> sats) const {
    const int nuc_first = core.first, nuc_last = core.last;
    while (!sats.empty()) {
      std::size_t pick = sats.size();
      bool on_left = false;
      int best = 0;
      for (std::size_t i = 0; i < sats.size(); ++i) {
        int distance;
        bool left;
        if (sats[i].last < nuc_first) {
          distance = nuc_first - sats[i].last;
          left = true;
        } else if (sats[i].first > nuc_last) {
          distance = sats[i].first - nuc_last;
          left = false;
        } else {
          fail(Errc::non_projective_span, "satellite overlaps its nucleus");
        }
        if (pick == sats.size() || distance < best || (distance == best && left && !on_left)) {
          pick = i;
          best = distance;
          on_left = left;
        }
      }
      if (on_left ? sats[pick].last != core.first - 1 : sats[pick].first != core.last + 1)
        fail(Errc::non_projective_span, "satellite not adjacent to its nucleus");
      NaryNode span;
      span.kind = NodeKind::span;
      core.role = Role::nucleus;
      core.label = kSpanLabel;
      NaryNode sat = std::move(sats[pick]);
      sats.erase(sats.begin() + static_cast<std::ptrdiff_t>(pick));
      sat.role = Role::satellite;
      if (on_left) {
        span.children.push_back(std::move(sat));
        span.children.push_back(std::move(core));
      } else {
        span.children.push_back(std::move(core));
        span.children.push_back(std::move(sat));
      }
      span.first = span.children.front().first;
      span.last = span.children.back().last;
      core = std::move(span);
    }
    return core;
  }

  NaryNode build(RawNode* x) {
    ++visited;
    NaryNode core;
    std::vector<NaryNode> sats;
    std::vector<RawNode*> multinuc_kids;
    RawNode* span_kid = nullptr;
    for (RawNode* c : x->children) {
      switch (classify(*c, *x)) {
        case Attach::span_child:
          if (span_kid) fail(Errc::malformed_xml, "node " + x->id + " has two span children");
          span_kid = c;
          break;
        case Attach::multinuc_child:
          multinuc_kids.push_back(c);
          break;
        case Attach::satellite: {
          NaryNode s = build(c);
          s.label = c->relname;
          sats.push_back(std::move(s));
          break;
        }
      }
    }

    if (x->segment) {
      if (span_kid || !multinuc_kids.empty())
        fail(Errc::malformed_xml, "segment " + x->id + " used as a group");
      core.kind = NodeKind::leaf;
      core.edu = x->edu;
      core.first = core.last = x->edu;
    } else if (x->multinuc_group) {
      if (span_kid) fail(Errc::malformed_xml, "span link into multinuc group " + x->id);
      if (multinuc_kids.size() < 2)
        fail(Errc::malformed_xml, "multinuc group " + x->id + " needs at least two nuclei");
      const std::string& rel = multinuc_kids.front()->relname;
      core.kind = NodeKind::multinuc;
      for (RawNode* c : multinuc_kids) {
        if (c->relname != rel)
          fail(Errc::malformed_xml, "mixed relations under multinuc group " + x->id);
        NaryNode n = build(c);
        n.role = Role::nucleus;
        n.label = rel;
        core.children.push_back(std::move(n));
      }
      std::sort(core.children.begin(), core.children.end(),
                [](const NaryNode& a, const NaryNode& b) { return a.first < b.first; });
      // Splice in nested multinucs that repeat the same relation, so the
      // normal form keeps one flat node per run.
      std::vector<NaryNode> flat;
      for (NaryNode& c : core.children) {
        if (c.kind == NodeKind::multinuc && c.children.front().label == rel) {
          for (NaryNode& g : c.children) flat.push_back(std::move(g));
        } else {
          flat.push_back(std::move(c));
        }
      }
      core.children = std::move(flat);
      for (std::size_t i = 0; i + 1 < core.children.size(); ++i) {
        if (core.children[i].last + 1 != core.children[i + 1].first)
          fail(Errc::non_projective_span, "gap inside multinuc group " + x->id);
      }
      core.first = core.children.front().first;
      core.last = core.children.back().last;
    } else {
      if (!span_kid) fail(Errc::malformed_xml, "span group " + x->id + " has no span child");
      if (!multinuc_kids.empty())
        fail(Errc::malformed_xml, "multinuc relation attached to span group " + x->id);
      core = build(span_kid);
    }
    return wrap(std::move(core), std::move(sats));
  }
};

std::string stem_of(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

ConstituentTree parse_rs3(const std::string& xml, const std::string& doc_id,
                          const Rs3Options& opts) {
  pt::ptree doc;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::malformed_xml, doc_id + ": " + e.message());
  }

  const pt::ptree* rst = doc.get_child_optional("rst").get_ptr();
  if (!rst) throw Error(Errc::malformed_xml, doc_id + ": missing <rst> element");

  Parser p{doc_id, opts, {}, {}, {}, 0};
  if (auto rels = rst->get_child_optional("header.relations")) {
    for (const auto& [key, value] : *rels) {
      if (key != "rel") continue;
      const std::string name = value.get<std::string>("<xmlattr>.name", "");
      const std::string type = value.get<std::string>("<xmlattr>.type", "");
      if (name.empty()) throw Error(Errc::malformed_xml, doc_id + ": relation without a name");
      if (type == "rst")
        p.inventory.add(name, RelKind::rst);
      else if (type == "multinuc")
        p.inventory.add(name, RelKind::multinuc);
      else
        throw Error(Errc::malformed_xml, doc_id + ": relation type \"" + type + "\"");
    }
  }

  const pt::ptree* body = rst->get_child_optional("body").get_ptr();
  if (!body) throw Error(Errc::malformed_xml, doc_id + ": missing <body> element");

  for (const auto& [key, value] : *body) {
    if (key != "segment" && key != "group") continue;
    RawNode raw;
    raw.id = value.get<std::string>("<xmlattr>.id", "");
    if (raw.id.empty()) throw Error(Errc::malformed_xml, doc_id + ": node without an id");
    raw.parent = value.get<std::string>("<xmlattr>.parent", "");
    raw.relname = value.get<std::string>("<xmlattr>.relname", "");
    if (key == "segment") {
      raw.segment = true;
      raw.text = normalize_ws(value.get_value<std::string>());
    } else {
      const std::string type = value.get<std::string>("<xmlattr>.type", "");
      if (type == "multinuc")
        raw.multinuc_group = true;
      else if (type != "span")
        throw Error(Errc::malformed_xml, doc_id + ": group type \"" + type + "\"");
    }
    auto [it, fresh] = p.nodes.emplace(raw.id, std::move(raw));
    if (!fresh) throw Error(Errc::malformed_xml, doc_id + ": duplicate id " + it->first);
    if (it->second.segment) p.segments_in_order.push_back(&it->second);
  }
  if (p.segments_in_order.empty()) throw Error(Errc::malformed_xml, doc_id + ": no segments");

  // Count dependents before deciding what a lenient parse may drop.
  std::map<std::string, int> dependents;
  for (const auto& [id, raw] : p.nodes)
    if (!raw.parent.empty()) ++dependents[raw.parent];

  for (auto it = p.segments_in_order.begin(); it != p.segments_in_order.end();) {
    RawNode* seg = *it;
    if (!seg->text.empty()) {
      ++it;
      continue;
    }
    const bool droppable = opts.lenient && dependents[seg->id] == 0 && !seg->parent.empty() &&
                           seg->relname != kSpanLabel &&
                           p.inventory.has(seg->relname, RelKind::rst);
    if (!droppable) throw Error(Errc::empty_segment, doc_id + ": segment " + seg->id);
    if (opts.warnings)
      opts.warnings->push_back(doc_id + ": dropped empty segment " + seg->id);
    p.nodes.erase(seg->id);
    it = p.segments_in_order.erase(it);
  }

  ConstituentTree tree;
  tree.doc_id = doc_id;
  tree.inventory = p.inventory;
  int edu = 0;
  for (RawNode* seg : p.segments_in_order) {
    seg->edu = ++edu;
    tree.edus.push_back(Edu{edu, seg->text, {}, {}});
  }

  RawNode* root = nullptr;
  for (auto& [id, raw] : p.nodes) {
    if (raw.parent.empty()) {
      if (root) throw Error(Errc::multiple_roots, doc_id + ": " + root->id + " and " + id);
      root = &raw;
      continue;
    }
    auto parent_it = p.nodes.find(raw.parent);
    if (parent_it == p.nodes.end())
      throw Error(Errc::dangling_parent_id, doc_id + ": node " + id + " -> " + raw.parent);
    parent_it->second.children.push_back(&raw);
  }
  if (!root) throw Error(Errc::no_root, doc_id);

  tree.root = p.build(root);
  tree.root.role = Role::nucleus;
  tree.root.label = kRootLabel;
  if (p.visited != static_cast<int>(p.nodes.size()))
    throw Error(Errc::malformed_xml, doc_id + ": unreachable nodes in body");
  validate(tree);
  return tree;
}

ConstituentTree load_rs3(const std::string& path, const Rs3Options& opts) {
  return parse_rs3(read_file(path), stem_of(path), opts);
}

namespace {

struct Writer {
  const ConstituentTree& tree;
  RelationInventory inventory;
  int next_group;
  struct GroupRow {
    int id;
    bool multinuc;
    int parent;
    std::string relname;
  };
  std::vector<std::string> seg_parent, seg_relname;
  std::vector<GroupRow> groups;

  explicit Writer(const ConstituentTree& t)
      : tree(t),
        inventory(t.inventory),
        next_group(static_cast<int>(t.edus.size()) + 1),
        seg_parent(t.edus.size()),
        seg_relname(t.edus.size()) {
    collect_relations(t.root);
  }

  void collect_relations(const NaryNode& node) {
    for (const auto& c : node.children) {
      if (c.role == Role::satellite)
        inventory.add(c.label, RelKind::rst);
      else if (node.kind == NodeKind::multinuc)
        inventory.add(c.label, RelKind::multinuc);
      collect_relations(c);
    }
  }

  // Emits rows for the subtree and returns the id its parent should point at.
  int emit(const NaryNode& node, int parent, const std::string& relname) {
    if (node.is_leaf()) {
      seg_parent[node.edu - 1] = parent ? std::to_string(parent) : "";
      seg_relname[node.edu - 1] = relname;
      return node.edu;
    }
    const int gid = next_group++;
    groups.push_back({gid, node.kind == NodeKind::multinuc, parent, relname});
    if (node.kind == NodeKind::multinuc) {
      for (const auto& c : node.children) emit(c, gid, c.label);
    } else {
      const NaryNode& nuc = node.children[node.children[0].role == Role::nucleus ? 0 : 1];
      const NaryNode& sat = node.children[node.children[0].role == Role::nucleus ? 1 : 0];
      const int nucleus_id = emit(nuc, gid, kSpanLabel);
      emit(sat, nucleus_id, sat.label);
    }
    return gid;
  }
};

}  // namespace

std::string write_rs3(const ConstituentTree& tree) {
  Writer w(tree);
  w.emit(tree.root, 0, "");

  std::ostringstream out;
  out << "<rst>\n\t<header>\n\t\t<relations>\n";
  for (const auto& [name, kind] : w.inventory.entries) {
    out << "\t\t\t<rel name=\"" << xml_escape(name) << "\" type=\""
        << (kind == RelKind::rst ? "rst" : "multinuc") << "\"/>\n";
  }
  out << "\t\t</relations>\n\t</header>\n\t<body>\n";
  for (std::size_t i = 0; i < tree.edus.size(); ++i) {
    out << "\t\t<segment id=\"" << (i + 1) << "\"";
    if (!w.seg_parent[i].empty())
      out << " parent=\"" << w.seg_parent[i] << "\" relname=\"" << xml_escape(w.seg_relname[i])
          << "\"";
    out << ">" << xml_escape(tree.edus[i].text) << "</segment>\n";
  }
  std::sort(w.groups.begin(), w.groups.end(),
            [](const Writer::GroupRow& a, const Writer::GroupRow& b) { return a.id < b.id; });
  for (const auto& g : w.groups) {
    out << "\t\t<group id=\"" << g.id << "\" type=\"" << (g.multinuc ? "multinuc" : "span")
        << "\"";
    if (g.parent) out << " parent=\"" << g.parent << "\" relname=\"" << xml_escape(g.relname) << "\"";
    out << "/>\n";
  }
  out << "\t</body>\n</rst>\n";
  return out.str();
}

}  // namespace rstlab
