#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "speechdep/treebank.hpp"

namespace speechdep {

inline constexpr const char* kBlankSymbol = "<blank>";
inline constexpr const char* kSpaceSymbol = "<space>";

// Symbol inventory of a frame classifier, with the two reserved entries:
// the no-emission blank and the word separator.
struct SymbolTable {
  std::vector<std::string> symbols;
  int blank = -1;
  int space = -1;

  int size() const { return static_cast<int>(symbols.size()); }
};

// Builds a table from a symbol list, locating the reserved names. Throws
// if either is missing or if they coincide.
SymbolTable make_symbol_table(std::vector<std::string> symbols);

// Per-frame log-probabilities over a symbol vocabulary.
struct FramePosterior {
  SymbolTable vocab;
  Eigen::MatrixXd logits;  // T x |vocab|

  int frames() const { return static_cast<int>(logits.rows()); }
};

// A predicted word and the inclusive frame range it occupies.
struct WordSpan {
  std::string word;
  int begin_frame = 0;
  int end_frame = 0;

  bool operator==(const WordSpan&) const = default;
};

// Per-frame argmax path; ties go to the lowest symbol index.
std::vector<int> ctc_greedy_path(const FramePosterior& posterior);

// Standard collapse: merge adjacent repeats, drop blanks; words are joined
// with single separators (runs of the separator never produce empty words).
std::string ctc_collapse(const std::vector<int>& path, const SymbolTable& vocab);

// Cuts the path at maximal separator runs and attributes frames to words.
// A word's span runs from the first frame of its first character run to
// the last frame of its last character run; blank frames strictly inside
// that range belong to the word, blank frames outside every range belong
// to no span.
std::vector<WordSpan> extract_word_spans(const std::vector<int>& path,
                                         const SymbolTable& vocab);

// Builds spans from forced-alignment timestamps instead of the CTC path:
// begin = floor(begin_ms/1000 * rate), end = min(T-1, floor(end_ms/1000 *
// rate)), empty ranges widened to one frame. Tokens must carry TimeSpans.
std::vector<WordSpan> spans_from_timestamps(const std::vector<Token>& tokens,
                                            double frame_rate_hz, int frame_count);

// Gated-recurrence pooling weights. Gate blocks are stacked in the order
// input, forget, cell, output.
struct LstmParams {
  Eigen::MatrixXd w_input;   // 4H x d
  Eigen::MatrixXd w_hidden;  // 4H x H
  Eigen::VectorXd bias;      // 4H

  int hidden_size() const { return static_cast<int>(w_hidden.cols()); }
  int input_size() const { return static_cast<int>(w_input.cols()); }
};

struct MeanPooling {};
struct LastPooling {};
struct RecurrentPooling {
  LstmParams params;
};

using PoolingMethod = std::variant<MeanPooling, LastPooling, RecurrentPooling>;

// Pools the frame rows of each span into one word vector: arithmetic mean,
// final row, or the final hidden state of a single-layer LSTM run from a
// zero initial state. Returns one row per span (width d, or the hidden
// size for recurrent pooling).
Eigen::MatrixXd pool_word_vectors(const Eigen::MatrixXd& frames,
                                  const std::vector<WordSpan>& spans,
                                  const PoolingMethod& method);

}  // namespace speechdep
