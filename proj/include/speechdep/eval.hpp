#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speechdep/treebank.hpp"

namespace speechdep {

enum class EditKind { Match, Substitute, Insert, Delete };

// One step of a word-level edit alignment. Match/Substitute carry both
// indices; Insert carries only the hypothesis index (token with no
// reference counterpart); Delete carries only the reference index.
// Indices are 1-based; 0 means absent.
struct AlignmentOp {
  EditKind kind = EditKind::Match;
  int hyp_index = 0;
  int ref_index = 0;

  bool operator==(const AlignmentOp&) const = default;
};

// Minimum-edit-distance alignment with unit substitute/insert/delete
// costs. Ties are broken by backtrace preference match/substitute, then
// delete, then insert.
std::vector<AlignmentOp> levenshtein_align(const std::vector<std::string>& hyp_forms,
                                           const std::vector<std::string>& ref_forms,
                                           bool case_fold = false);

// Word error rate: edit distance over forms divided by reference length.
// Throws on an empty reference.
double wer(const std::vector<std::string>& hyp_forms,
           const std::vector<std::string>& ref_forms, bool case_fold = false);

// Character error rate over Unicode code points of the two transcriptions.
// Throws on an empty reference.
double cer(const std::string& hyp_text, const std::string& ref_text,
           bool case_fold = false);

// One aligned slot: either a real token (with its head already remapped to
// padded slot coordinates) or a dummy placeholder.
struct PaddedSlot {
  bool dummy = true;
  Token token;
};

// Hypothesis and reference padded to a common length by inserting dummy
// slots: a deletion puts a dummy on the hypothesis side, an insertion puts
// one on the reference side. Aligned slots are never both dummy.
struct PaddedPair {
  std::vector<PaddedSlot> hyp;
  std::vector<PaddedSlot> ref;

  int size() const { return static_cast<int>(hyp.size()); }
};

PaddedPair align_and_pad(const Sentence& hyp, const Sentence& ref,
                         bool case_fold = false);

struct EvalCounts {
  std::int64_t ref_tokens = 0;
  std::int64_t hyp_tokens = 0;
  std::int64_t matches = 0;
  std::int64_t substitutions = 0;
  std::int64_t insertions = 0;
  std::int64_t deletions = 0;
  std::int64_t correct_pos = 0;
  std::int64_t correct_heads = 0;
  std::int64_t correct_heads_and_labels = 0;
  std::int64_t char_edits = 0;
  std::int64_t ref_chars = 0;

  EvalCounts& operator+=(const EvalCounts& other);
  bool operator==(const EvalCounts&) const = default;
};

// Scores one padded pair. A slot with a dummy on either side is a parsing
// error; the reference token count is the denominator for POS/UAS/LAS, so
// hypothesis-only slots add an insertion but no denominator. For real-real
// slots, attachment credit compares padded head positions and does not
// require the forms to match.
EvalCounts score_pair(const PaddedPair& pair, bool case_fold = false);

// Full counts for one sentence pair: alignment-padded parsing counts plus
// the character-level edits of the joined transcriptions.
EvalCounts evaluate_pair(const Sentence& hyp, const Sentence& ref,
                         bool case_fold = false);

struct EvalReport {
  double wer = 0.0;
  double cer = 0.0;
  double pos_acc = 0.0;
  double uas = 0.0;
  double las = 0.0;
  EvalCounts counts;
};

EvalReport report_from_counts(const EvalCounts& counts);

// Micro-averaged report over sentence pairs matched by sent_id. Word- and
// character-level error rates come from the same alignments that drive the
// padding. Throws when a reference sentence has no hypothesis counterpart
// or when an id is duplicated or unpaired.
EvalReport evaluate_corpus(const Corpus& hyp, const Corpus& ref,
                           bool case_fold = false);

// Classic equal-length evaluation; requires every paired sentence to have
// identical forms (after optional case folding) and equal length, and
// throws otherwise with a pointer to evaluate_corpus. Agrees exactly with
// evaluate_corpus wherever its precondition holds.
EvalReport evaluate_standard(const Corpus& hyp, const Corpus& ref,
                             bool case_fold = false);

}  // namespace speechdep
