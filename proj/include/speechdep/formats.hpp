#pragma once

#include <optional>
#include <string>
#include <vector>

#include "speechdep/ctc.hpp"
#include "speechdep/graph.hpp"
#include "speechdep/relpos.hpp"
#include "speechdep/treebank.hpp"

namespace speechdep {

// Thrown for unreadable or unwritable files (exit code 2 at the CLI, as
// opposed to validation failures which exit 1).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path);  // "-" reads stdin
void write_file(const std::string& path, const std::string& content);  // "-" writes stdout

// ---------------------------------------------------------------------------
// Arc-score files: per sentence a header `#scores sent_id n L`, then n+1
// rows of n tab-separated reals, then, when L > 0, (n+1)*n rows of L reals
// ordered by head then dependent.

struct ScoredSentence {
  std::string sent_id;
  ArcScoreMatrix arcs;
  std::optional<LabelScoreTensor> labels;
};

std::vector<ScoredSentence> parse_score_file(const std::string& text);
std::string write_score_file(const std::vector<ScoredSentence>& sentences);

// ---------------------------------------------------------------------------
// Posterior files: per sentence a header `#posterior sent_id T V` followed
// by T rows of V reals. The symbol vocabulary lives in its own file, one
// symbol per line, with the reserved names <blank> and <space>.

struct PosteriorRecord {
  std::string sent_id;
  Eigen::MatrixXd logits;  // T x V
};

std::vector<PosteriorRecord> parse_posterior_file(const std::string& text);
std::string write_posterior_file(const std::vector<PosteriorRecord>& records);

SymbolTable parse_vocab_file(const std::string& text);

// Frame-feature files: `#frames sent_id T d` followed by T rows of d reals
// (the per-frame vectors that word spans index into).

struct FrameRecord {
  std::string sent_id;
  Eigen::MatrixXd frames;  // T x d
};

std::vector<FrameRecord> parse_frame_file(const std::string& text);
std::string write_frame_file(const std::vector<FrameRecord>& records);

// ---------------------------------------------------------------------------
// Label files: one token per line as form<TAB>pos<TAB>label<TAB>deprel,
// sentences separated by blank lines, with `# sent_id = ...` comments.

struct LabeledToken {
  std::string form;
  std::string pos;
  RelPosLabel label;
  std::string deprel = "_";
};

struct LabeledSentence {
  std::string sent_id;
  std::vector<LabeledToken> tokens;
};

std::vector<LabeledSentence> parse_label_file(const std::string& text);
std::string write_label_file(const std::vector<LabeledSentence>& sentences);

// ---------------------------------------------------------------------------
// Token files: form<TAB>pos lines in the same block layout; extra columns
// are ignored so label files double as token files.

struct TokenizedSentence {
  std::string sent_id;
  std::vector<std::string> forms;
  std::vector<std::string> pos_tags;
};

std::vector<TokenizedSentence> parse_token_file(const std::string& text);

// ---------------------------------------------------------------------------
// Recurrent-pooling weights: header `#lstm d_in d_hidden`, then the input
// weights (4H rows of d_in reals), hidden weights (4H rows of H reals) and
// one row of 4H biases. Gate blocks ordered input, forget, cell, output.

LstmParams parse_lstm_weights(const std::string& text);
std::string write_lstm_weights(const LstmParams& params);

// One relation name per line.
std::vector<std::string> parse_relation_file(const std::string& text);

}  // namespace speechdep
