#include "rstlab/rsd.hpp"

#include <sstream>

#include "rstlab/errors.hpp"
#include "rstlab/strutil.hpp"

namespace rstlab {

bool structurally_equal(const DepDocument& a, const DepDocument& b) {
  if (a.edus.size() != b.edus.size()) return false;
  for (std::size_t i = 0; i < a.edus.size(); ++i)
    if (a.edus[i].index != b.edus[i].index || a.edus[i].text != b.edus[i].text) return false;
  return a.heads == b.heads && a.labels == b.labels;
}

void validate(const DepDocument& doc) {
  const int n = doc.size();
  if (n == 0) throw Error(Errc::empty_input, doc.doc_id + ": no EDUs");
  if (static_cast<int>(doc.heads.size()) != n || static_cast<int>(doc.labels.size()) != n)
    throw Error(Errc::bad_column_count, doc.doc_id + ": heads/labels out of step with EDUs");
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const int h = doc.heads[i];
    if (h < 0 || h > n)
      throw Error(Errc::head_out_of_range,
                  doc.doc_id + ": EDU " + std::to_string(i + 1) + " -> " + std::to_string(h));
    if (h == i + 1)
      throw Error(Errc::cycle_detected, doc.doc_id + ": EDU " + std::to_string(i + 1) +
                                            " heads to itself");
    if (h == 0) ++roots;
  }
  if (roots > 1) throw Error(Errc::multiple_roots, doc.doc_id);
  // Walk each head chain; revisiting a node from the same walk means a cycle.
  std::vector<int> seen_at(static_cast<std::size_t>(n), -1);
  for (int start = 0; start < n; ++start) {
    int at = start;
    while (at >= 0 && seen_at[at] == -1) {
      seen_at[at] = start;
      at = doc.heads[at] - 1;
    }
    if (at >= 0 && seen_at[at] == start)
      throw Error(Errc::cycle_detected, doc.doc_id + ": cycle through EDU " + std::to_string(at + 1));
  }
  if (roots == 0) throw Error(Errc::no_root, doc.doc_id);
}

DepDocument parse_rsd(const std::string& text, const std::string& doc_id) {
  DepDocument doc;
  doc.doc_id = doc_id;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cols = split_char(line, '\t');
    if (cols.size() != 4)
      throw Error(Errc::bad_column_count, doc_id + ": line " + std::to_string(lineno) + " has " +
                                              std::to_string(cols.size()) + " columns");
    int index = 0, head = 0;
    try {
      index = std::stoi(cols[0]);
      head = std::stoi(cols[2]);
    } catch (const std::exception&) {
      throw Error(Errc::bad_column_count,
                  doc_id + ": line " + std::to_string(lineno) + " has non-numeric index or head");
    }
    if (index != doc.size() + 1)
      throw Error(Errc::bad_edu_index, doc_id + ": line " + std::to_string(lineno) + " has index " +
                                           cols[0]);
    doc.edus.push_back(Edu{index, normalize_ws(cols[1]), {}, {}});
    doc.heads.push_back(head);
    doc.labels.push_back(trim(cols[3]));
  }
  validate(doc);
  return doc;
}

DepDocument load_rsd(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  return parse_rsd(read_file(path), dot == std::string::npos ? name : name.substr(0, dot));
}

std::string write_rsd(const DepDocument& doc) {
  std::ostringstream out;
  for (int i = 0; i < doc.size(); ++i) {
    out << (i + 1) << '\t' << doc.edus[i].text << '\t' << doc.heads[i] << '\t' << doc.labels[i]
        << '\n';
  }
  return out.str();
}

}  // namespace rstlab
