#ifndef RSTLAB_ERRORS_HPP
#define RSTLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rstlab {

// Domain error codes. Each maps to one failure mode of the public API;
// callers that need to branch should switch on code(), not on message text.
enum class Errc {
  io_error,
  // rs3
  malformed_xml,
  dangling_parent_id,
  unknown_relation,
  non_projective_span,
  multiple_roots,
  empty_segment,
  // rsd
  bad_column_count,
  bad_edu_index,
  head_out_of_range,
  cycle_detected,
  no_root,
  // corpus
  bad_manifest,
  missing_document,
  duplicate_doc_id,
  empty_corpus,
  // metrics
  leaf_mismatch,
  empty_input,
  token_count_mismatch,
  // relmap
  unknown_label,
  // parser
  illegal_transition,
  non_terminal_end,
  empty_train_set,
  inventory_mismatch,
  model_hash_mismatch,
  // experiments
  unknown_genre,
  infeasible_budget,
  leakage_detected,
  // analysis
  doc_mismatch,
  zero_margin,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace rstlab

#endif
