#include "rstlab/errors.hpp"

namespace rstlab {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::io_error: return "IoError";
    case Errc::malformed_xml: return "MalformedXml";
    case Errc::dangling_parent_id: return "DanglingParentId";
    case Errc::unknown_relation: return "UnknownRelation";
    case Errc::non_projective_span: return "NonProjectiveSpan";
    case Errc::multiple_roots: return "MultipleRoots";
    case Errc::empty_segment: return "EmptySegment";
    case Errc::bad_column_count: return "BadColumnCount";
    case Errc::bad_edu_index: return "BadEduIndex";
    case Errc::head_out_of_range: return "HeadOutOfRange";
    case Errc::cycle_detected: return "CycleDetected";
    case Errc::no_root: return "NoRoot";
    case Errc::bad_manifest: return "BadManifest";
    case Errc::missing_document: return "MissingDocument";
    case Errc::duplicate_doc_id: return "DuplicateDocId";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::leaf_mismatch: return "LeafMismatch";
    case Errc::empty_input: return "EmptyInput";
    case Errc::token_count_mismatch: return "TokenCountMismatch";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::illegal_transition: return "IllegalTransition";
    case Errc::non_terminal_end: return "NonTerminalEnd";
    case Errc::empty_train_set: return "EmptyTrainSet";
    case Errc::inventory_mismatch: return "InventoryMismatch";
    case Errc::model_hash_mismatch: return "ModelHashMismatch";
    case Errc::unknown_genre: return "UnknownGenre";
    case Errc::infeasible_budget: return "InfeasibleBudget";
    case Errc::leakage_detected: return "LeakageDetected";
    case Errc::doc_mismatch: return "DocMismatch";
    case Errc::zero_margin: return "ZeroMargin";
  }
  return "Error";
}

}  // namespace rstlab
