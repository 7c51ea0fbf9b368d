#include "speechdep/ctc.hpp"

#include <cmath>
#include <stdexcept>

namespace speechdep {

SymbolTable make_symbol_table(std::vector<std::string> symbols) {
  SymbolTable table;
  table.symbols = std::move(symbols);
  for (int i = 0; i < table.size(); ++i) {
    if (table.symbols[i] == kBlankSymbol && table.blank < 0) table.blank = i;
    if (table.symbols[i] == kSpaceSymbol && table.space < 0) table.space = i;
  }
  if (table.blank < 0 || table.space < 0)
    throw std::invalid_argument("symbol vocabulary must contain " +
                                std::string(kBlankSymbol) + " and " +
                                std::string(kSpaceSymbol));
  return table;
}

std::vector<int> ctc_greedy_path(const FramePosterior& posterior) {
  if (posterior.frames() < 1)
    throw std::invalid_argument("posterior must cover at least one frame");
  if (posterior.logits.cols() != posterior.vocab.size())
    throw std::invalid_argument("posterior width does not match the vocabulary");

  std::vector<int> path(posterior.frames());
  for (int t = 0; t < posterior.frames(); ++t) {
    int best = 0;
    for (int v = 1; v < posterior.vocab.size(); ++v)
      if (posterior.logits(t, v) > posterior.logits(t, best)) best = v;
    path[t] = best;
  }
  return path;
}

namespace {

// Word chunks of a path: maximal separator runs cut the frame sequence;
// a chunk's text is its collapsed symbols and its span covers the frames
// from the first to the last character run. Chunks that collapse to
// nothing (all blank) yield no span.
std::vector<WordSpan> chunk_words(const std::vector<int>& path,
                                  const SymbolTable& vocab) {
  std::vector<WordSpan> spans;
  const int T = static_cast<int>(path.size());
  int t = 0;
  while (t < T) {
    if (path[t] == vocab.space) {
      ++t;
      continue;
    }
    // Chunk [t, chunk_end) up to the next separator frame.
    int chunk_end = t;
    while (chunk_end < T && path[chunk_end] != vocab.space) ++chunk_end;

    WordSpan span;
    int previous = -1;
    int first_char_frame = -1;
    int last_char_frame = -1;
    for (int u = t; u < chunk_end; ++u) {
      const int symbol = path[u];
      if (symbol == vocab.blank) {
        previous = -1;
        continue;
      }
      if (symbol != previous) span.word += vocab.symbols[symbol];
      if (first_char_frame < 0) first_char_frame = u;
      last_char_frame = u;  // repeats extend the character's run
      previous = symbol;
    }
    if (!span.word.empty()) {
      span.begin_frame = first_char_frame;
      span.end_frame = last_char_frame;
      spans.push_back(std::move(span));
    }
    t = chunk_end;
  }
  return spans;
}

}  // namespace

std::string ctc_collapse(const std::vector<int>& path, const SymbolTable& vocab) {
  std::string out;
  for (const WordSpan& span : chunk_words(path, vocab)) {
    if (!out.empty()) out += ' ';
    out += span.word;
  }
  return out;
}

std::vector<WordSpan> extract_word_spans(const std::vector<int>& path,
                                         const SymbolTable& vocab) {
  return chunk_words(path, vocab);
}

std::vector<WordSpan> spans_from_timestamps(const std::vector<Token>& tokens,
                                            double frame_rate_hz, int frame_count) {
  if (frame_rate_hz <= 0.0) throw std::invalid_argument("frame rate must be positive");
  std::vector<WordSpan> spans;
  spans.reserve(tokens.size());
  for (const Token& token : tokens) {
    if (!token.span)
      throw std::invalid_argument("token '" + token.form + "' carries no time span");
    WordSpan span;
    span.word = token.form;
    span.begin_frame = static_cast<int>(
        std::floor(static_cast<double>(token.span->begin_ms) / 1000.0 * frame_rate_hz));
    if (span.begin_frame >= frame_count)
      throw std::out_of_range("token '" + token.form + "' begins at frame " +
                              std::to_string(span.begin_frame) + " beyond the signal (" +
                              std::to_string(frame_count) + " frames)");
    span.end_frame = static_cast<int>(
        std::floor(static_cast<double>(token.span->end_ms) / 1000.0 * frame_rate_hz));
    span.end_frame = std::min(span.end_frame, frame_count - 1);
    if (span.end_frame < span.begin_frame) span.end_frame = span.begin_frame;
    spans.push_back(std::move(span));
  }
  return spans;
}

namespace {

Eigen::VectorXd lstm_final_state(const Eigen::MatrixXd& frames, int begin, int end,
                                 const LstmParams& params) {
  const int H = params.hidden_size();
  if (params.w_input.rows() != 4 * H || params.bias.size() != 4 * H)
    throw std::invalid_argument("recurrent pooling weights are inconsistent");
  if (params.input_size() != frames.cols())
    throw std::invalid_argument("recurrent pooling input width does not match frames");

  Eigen::VectorXd hidden = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd cell = Eigen::VectorXd::Zero(H);
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };

  for (int t = begin; t <= end; ++t) {
    Eigen::VectorXd gates = params.w_input * frames.row(t).transpose() +
                            params.w_hidden * hidden + params.bias;
    Eigen::VectorXd input_gate = gates.segment(0, H).unaryExpr(sigmoid);
    Eigen::VectorXd forget_gate = gates.segment(H, H).unaryExpr(sigmoid);
    Eigen::VectorXd candidate =
        gates.segment(2 * H, H).unaryExpr([](double x) { return std::tanh(x); });
    Eigen::VectorXd output_gate = gates.segment(3 * H, H).unaryExpr(sigmoid);
    cell = forget_gate.cwiseProduct(cell) + input_gate.cwiseProduct(candidate);
    hidden = output_gate.cwiseProduct(cell.unaryExpr([](double x) { return std::tanh(x); }));
  }
  return hidden;
}

}  // namespace

Eigen::MatrixXd pool_word_vectors(const Eigen::MatrixXd& frames,
                                  const std::vector<WordSpan>& spans,
                                  const PoolingMethod& method) {
  const int T = static_cast<int>(frames.rows());
  for (const WordSpan& span : spans)
    if (span.begin_frame < 0 || span.end_frame < span.begin_frame ||
        span.end_frame >= T)
      throw std::out_of_range("span (" + std::to_string(span.begin_frame) + ", " +
                              std::to_string(span.end_frame) +
                              ") outside the frame matrix");

  const int width = std::holds_alternative<RecurrentPooling>(method)
                        ? std::get<RecurrentPooling>(method).params.hidden_size()
                        : static_cast<int>(frames.cols());
  Eigen::MatrixXd pooled(spans.size(), width);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const WordSpan& span = spans[i];
    const int rows = span.end_frame - span.begin_frame + 1;
    if (std::holds_alternative<MeanPooling>(method)) {
      pooled.row(i) = frames.middleRows(span.begin_frame, rows).colwise().mean();
    } else if (std::holds_alternative<LastPooling>(method)) {
      pooled.row(i) = frames.row(span.end_frame);
    } else {
      pooled.row(i) = lstm_final_state(frames, span.begin_frame, span.end_frame,
                                       std::get<RecurrentPooling>(method).params)
                          .transpose();
    }
  }
  return pooled;
}

}  // namespace speechdep
