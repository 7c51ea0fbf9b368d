#include "speechdep/formats.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace speechdep {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream stream(text);
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream stream(line);
  std::string field;
  while (stream >> field) out.push_back(field);
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_real(const std::string& field, const std::string& context) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument(context + ": expected a real number, got '" + field + "'");
  return value;
}

long parse_count(const std::string& field, const std::string& context) {
  long value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || value < 0)
    throw std::invalid_argument(context + ": expected a count, got '" + field + "'");
  return value;
}

std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// Reads `rows` consecutive non-blank lines of exactly `cols` reals.
Eigen::MatrixXd read_matrix(const std::vector<std::string>& lines, std::size_t& cursor,
                            long rows, long cols, const std::string& context) {
  Eigen::MatrixXd matrix(rows, cols);
  for (long r = 0; r < rows; ++r) {
    while (cursor < lines.size() && lines[cursor].empty()) ++cursor;
    if (cursor >= lines.size())
      throw std::invalid_argument(context + ": unexpected end of file at row " +
                                  std::to_string(r + 1));
    const std::vector<std::string> fields = split_ws(lines[cursor]);
    if (static_cast<long>(fields.size()) != cols)
      throw std::invalid_argument(context + ": expected " + std::to_string(cols) +
                                  " values per row, got " +
                                  std::to_string(fields.size()));
    for (long c = 0; c < cols; ++c) matrix(r, c) = parse_real(fields[c], context);
    ++cursor;
  }
  return matrix;
}

void append_matrix(std::string& out, const Eigen::MatrixXd& matrix) {
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c) out += '\t';
      out += format_real(matrix(r, c));
    }
    out += '\n';
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  if (stream.bad()) throw IoError("error while reading '" + path + "'");
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw IoError("cannot open '" + path + "' for writing");
  stream << content;
  stream.flush();
  if (!stream) throw IoError("error while writing '" + path + "'");
}

std::vector<ScoredSentence> parse_score_file(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  std::vector<ScoredSentence> sentences;
  std::size_t cursor = 0;
  while (true) {
    while (cursor < lines.size() && lines[cursor].empty()) ++cursor;
    if (cursor >= lines.size()) break;

    const std::vector<std::string> header = split_ws(lines[cursor]);
    if (header.size() != 4 || header[0] != "#scores")
      throw std::invalid_argument("line " + std::to_string(cursor + 1) +
                                  ": expected '#scores sent_id n L'");
    ScoredSentence record;
    record.sent_id = header[1];
    const std::string context = "scores for sentence '" + record.sent_id + "'";
    const long n = parse_count(header[2], context);
    const long L = parse_count(header[3], context);
    if (n < 1) throw std::invalid_argument(context + ": sentence length must be >= 1");
    ++cursor;

    record.arcs.scores = read_matrix(lines, cursor, n + 1, n, context);
    if (L > 0) {
      LabelScoreTensor tensor;
      tensor.n = static_cast<int>(n);
      tensor.scores = read_matrix(lines, cursor, (n + 1) * n, L, context);
      record.labels = std::move(tensor);
    }
    sentences.push_back(std::move(record));
  }
  return sentences;
}

std::string write_score_file(const std::vector<ScoredSentence>& sentences) {
  std::string out;
  for (const ScoredSentence& record : sentences) {
    const int n = record.arcs.length();
    const int L = record.labels ? record.labels->num_relations() : 0;
    out += "#scores " + record.sent_id + ' ' + std::to_string(n) + ' ' +
           std::to_string(L) + '\n';
    append_matrix(out, record.arcs.scores);
    if (record.labels) append_matrix(out, record.labels->scores);
  }
  return out;
}

std::vector<PosteriorRecord> parse_posterior_file(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  std::vector<PosteriorRecord> records;
  std::size_t cursor = 0;
  while (true) {
    while (cursor < lines.size() && lines[cursor].empty()) ++cursor;
    if (cursor >= lines.size()) break;

    const std::vector<std::string> header = split_ws(lines[cursor]);
    if (header.size() != 4 || header[0] != "#posterior")
      throw std::invalid_argument("line " + std::to_string(cursor + 1) +
                                  ": expected '#posterior sent_id T V'");
    PosteriorRecord record;
    record.sent_id = header[1];
    const std::string context = "posteriors for sentence '" + record.sent_id + "'";
    const long T = parse_count(header[2], context);
    const long V = parse_count(header[3], context);
    if (T < 1 || V < 2)
      throw std::invalid_argument(context + ": need T >= 1 frames and V >= 2 symbols");
    ++cursor;
    record.logits = read_matrix(lines, cursor, T, V, context);
    records.push_back(std::move(record));
  }
  return records;
}

std::string write_posterior_file(const std::vector<PosteriorRecord>& records) {
  std::string out;
  for (const PosteriorRecord& record : records) {
    out += "#posterior " + record.sent_id + ' ' + std::to_string(record.logits.rows()) +
           ' ' + std::to_string(record.logits.cols()) + '\n';
    append_matrix(out, record.logits);
  }
  return out;
}

SymbolTable parse_vocab_file(const std::string& text) {
  std::vector<std::string> symbols;
  for (const std::string& line : split_lines(text))
    if (!line.empty()) symbols.push_back(line);
  return make_symbol_table(std::move(symbols));
}

std::vector<FrameRecord> parse_frame_file(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  std::vector<FrameRecord> records;
  std::size_t cursor = 0;
  while (true) {
    while (cursor < lines.size() && lines[cursor].empty()) ++cursor;
    if (cursor >= lines.size()) break;

    const std::vector<std::string> header = split_ws(lines[cursor]);
    if (header.size() != 4 || header[0] != "#frames")
      throw std::invalid_argument("line " + std::to_string(cursor + 1) +
                                  ": expected '#frames sent_id T d'");
    FrameRecord record;
    record.sent_id = header[1];
    const std::string context = "frames for sentence '" + record.sent_id + "'";
    const long T = parse_count(header[2], context);
    const long d = parse_count(header[3], context);
    if (T < 1 || d < 1)
      throw std::invalid_argument(context + ": need T >= 1 and d >= 1");
    ++cursor;
    record.frames = read_matrix(lines, cursor, T, d, context);
    records.push_back(std::move(record));
  }
  return records;
}

std::string write_frame_file(const std::vector<FrameRecord>& records) {
  std::string out;
  for (const FrameRecord& record : records) {
    out += "#frames " + record.sent_id + ' ' + std::to_string(record.frames.rows()) +
           ' ' + std::to_string(record.frames.cols()) + '\n';
    append_matrix(out, record.frames);
  }
  return out;
}

std::vector<LabeledSentence> parse_label_file(const std::string& text) {
  std::vector<LabeledSentence> sentences;
  LabeledSentence current;
  bool in_block = false;
  int line_no = 0;

  auto flush = [&]() {
    if (!in_block) return;
    if (current.sent_id.empty())
      current.sent_id = std::to_string(sentences.size() + 1);
    sentences.push_back(std::move(current));
    current = LabeledSentence{};
    in_block = false;
  };

  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (line.empty()) {
      flush();
      continue;
    }
    in_block = true;
    if (line[0] == '#') {
      const std::string prefix = "# sent_id = ";
      if (line.rfind(prefix, 0) == 0) current.sent_id = line.substr(prefix.size());
      continue;
    }
    const std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 4)
      throw std::invalid_argument("label file line " + std::to_string(line_no) +
                                  ": expected form<TAB>pos<TAB>label<TAB>deprel");
    LabeledToken token;
    token.form = cols[0];
    token.pos = cols[1];
    token.label = RelPosLabel::parse(cols[2]);
    token.deprel = cols[3];
    current.tokens.push_back(std::move(token));
  }
  flush();
  return sentences;
}

std::string write_label_file(const std::vector<LabeledSentence>& sentences) {
  std::string out;
  for (const LabeledSentence& sentence : sentences) {
    out += "# sent_id = " + sentence.sent_id + '\n';
    for (const LabeledToken& token : sentence.tokens) {
      out += token.form;
      out += '\t';
      out += token.pos;
      out += '\t';
      out += token.label.render();
      out += '\t';
      out += token.deprel;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<TokenizedSentence> parse_token_file(const std::string& text) {
  std::vector<TokenizedSentence> sentences;
  TokenizedSentence current;
  bool in_block = false;
  int line_no = 0;

  auto flush = [&]() {
    if (!in_block) return;
    if (current.sent_id.empty())
      current.sent_id = std::to_string(sentences.size() + 1);
    sentences.push_back(std::move(current));
    current = TokenizedSentence{};
    in_block = false;
  };

  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (line.empty()) {
      flush();
      continue;
    }
    in_block = true;
    if (line[0] == '#') {
      const std::string prefix = "# sent_id = ";
      if (line.rfind(prefix, 0) == 0) current.sent_id = line.substr(prefix.size());
      continue;
    }
    const std::vector<std::string> cols = split_tabs(line);
    if (cols.size() < 2)
      throw std::invalid_argument("token file line " + std::to_string(line_no) +
                                  ": expected at least form<TAB>pos");
    current.forms.push_back(cols[0]);
    current.pos_tags.push_back(cols[1]);
  }
  flush();
  return sentences;
}

LstmParams parse_lstm_weights(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  std::size_t cursor = 0;
  while (cursor < lines.size() && lines[cursor].empty()) ++cursor;
  if (cursor >= lines.size())
    throw std::invalid_argument("weight file is empty");
  const std::vector<std::string> header = split_ws(lines[cursor]);
  if (header.size() != 3 || header[0] != "#lstm")
    throw std::invalid_argument("expected '#lstm d_in d_hidden' header");
  const long d_in = parse_count(header[1], "lstm weights");
  const long hidden = parse_count(header[2], "lstm weights");
  if (d_in < 1 || hidden < 1)
    throw std::invalid_argument("lstm weights: dimensions must be >= 1");
  ++cursor;

  LstmParams params;
  params.w_input = read_matrix(lines, cursor, 4 * hidden, d_in, "lstm input weights");
  params.w_hidden = read_matrix(lines, cursor, 4 * hidden, hidden, "lstm hidden weights");
  params.bias = read_matrix(lines, cursor, 1, 4 * hidden, "lstm bias").row(0);
  return params;
}

std::string write_lstm_weights(const LstmParams& params) {
  std::string out = "#lstm " + std::to_string(params.input_size()) + ' ' +
                    std::to_string(params.hidden_size()) + '\n';
  append_matrix(out, params.w_input);
  append_matrix(out, params.w_hidden);
  append_matrix(out, params.bias.transpose());
  return out;
}

std::vector<std::string> parse_relation_file(const std::string& text) {
  std::vector<std::string> relations;
  for (const std::string& line : split_lines(text))
    if (!line.empty()) relations.push_back(line);
  if (relations.empty())
    throw std::invalid_argument("relation vocabulary file is empty");
  return relations;
}

}  // namespace speechdep
