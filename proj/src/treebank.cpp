#include "speechdep/treebank.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace speechdep {

namespace {

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

bool parse_int(const std::string& s, std::int64_t& value) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

bool has_whitespace(const std::string& s) {
  return s.find_first_of(" \t\r\n\v\f") != std::string::npos;
}

// Splits a MISC column into AlignBegin/AlignEnd and the remaining
// `|`-joined payload, which is carried through untouched.
void split_misc(const std::string& misc, const std::string& sent_id, int line,
                std::optional<TimeSpan>& span, std::string& rest) {
  if (misc == "_" || misc.empty()) {
    rest = "_";
    return;
  }
  std::optional<std::int64_t> begin_ms, end_ms;
  std::string leftover;
  std::size_t start = 0;
  while (start <= misc.size()) {
    std::size_t pos = misc.find('|', start);
    std::string part = pos == std::string::npos ? misc.substr(start)
                                                : misc.substr(start, pos - start);
    if (part.rfind("AlignBegin=", 0) == 0 || part.rfind("AlignEnd=", 0) == 0) {
      bool is_begin = part[5] == 'B';
      std::int64_t v = 0;
      if (!parse_int(part.substr(part.find('=') + 1), v))
        throw ConlluError("non-integer " + part, sent_id, line);
      (is_begin ? begin_ms : end_ms) = v;
    } else {
      if (!leftover.empty()) leftover += '|';
      leftover += part;
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (begin_ms.has_value() != end_ms.has_value())
    throw ConlluError("MISC carries only one of AlignBegin/AlignEnd", sent_id, line);
  if (begin_ms) {
    if (*begin_ms < 0 || *begin_ms > *end_ms)
      throw ConlluError("invalid time span", sent_id, line);
    span = TimeSpan{*begin_ms, *end_ms};
  }
  rest = leftover.empty() ? "_" : leftover;
}

std::string join_misc(const Token& token) {
  if (!token.span) return token.misc;
  std::string out = "AlignBegin=" + std::to_string(token.span->begin_ms) +
                    "|AlignEnd=" + std::to_string(token.span->end_ms);
  if (token.misc != "_" && !token.misc.empty()) out += '|' + token.misc;
  return out;
}

// Picks the line of the first offending token when the violation names one,
// else the sentence's first line.
void validate_or_throw(const Sentence& sentence, int first_line,
                       const std::vector<int>& token_lines) {
  ValidationResult result = validate_tree(sentence, RootPolicy::MultiRoot);
  if (result.ok()) return;
  const Violation& violation = result.violations.front();
  int line = first_line;
  if (!violation.tokens.empty()) {
    int index = violation.tokens.front();
    if (index >= 1 && index <= static_cast<int>(token_lines.size()))
      line = token_lines[index - 1];
  }
  throw ConlluError(violation.message, sentence.sent_id, line);
}

}  // namespace

ConlluError::ConlluError(const std::string& what, std::string sent_id, int line)
    : std::runtime_error("sentence '" + sent_id + "', line " +
                         std::to_string(line) + ": " + what),
      sent_id_(std::move(sent_id)),
      line_(line) {}

ValidationResult validate_tree(const Sentence& sentence, RootPolicy policy) {
  ValidationResult result;
  const int n = sentence.size();
  if (n == 0) return result;

  auto add = [&result](ViolationKind kind, std::vector<int> tokens, std::string msg) {
    result.violations.push_back({kind, std::move(tokens), std::move(msg)});
  };

  bool index_ok = true;
  for (int i = 0; i < n; ++i) {
    if (sentence.tokens[i].index != i + 1) {
      add(ViolationKind::IndexSequence, {sentence.tokens[i].index},
          "token indices are not 1.." + std::to_string(n));
      index_ok = false;
      break;
    }
  }

  bool heads_ok = true;
  int roots = 0;
  for (const Token& token : sentence.tokens) {
    if (token.form.empty() || has_whitespace(token.form))
      add(ViolationKind::EmptyForm, {token.index},
          "token " + std::to_string(token.index) + " has an empty or whitespace form");
    if (token.head < 0 || token.head > n) {
      add(ViolationKind::HeadRange, {token.index},
          "head " + std::to_string(token.head) + " of token " +
              std::to_string(token.index) + " is outside [0, " + std::to_string(n) + "]");
      heads_ok = false;
    } else if (token.head == token.index) {
      add(ViolationKind::SelfHead, {token.index},
          "token " + std::to_string(token.index) + " is its own head");
      heads_ok = false;
    }
    if (token.head == 0) ++roots;
  }

  // Cycle detection only makes sense on an index-correct, range-correct
  // head function.
  if (index_ok && heads_ok) {
    // 0 = unknown, 1 = on current walk, 2 = reaches root
    std::vector<int> state(n + 1, 0);
    state[0] = 2;
    for (int start = 1; start <= n; ++start) {
      if (state[start] != 0) continue;
      int node = start;
      std::vector<int> walk;
      while (state[node] == 0) {
        state[node] = 1;
        walk.push_back(node);
        node = sentence.tokens[node - 1].head;
      }
      if (state[node] == 1) {
        // Walked into our own path: everything from `node` onward cycles.
        std::vector<int> cycle;
        auto it = std::find(walk.begin(), walk.end(), node);
        cycle.assign(it, walk.end());
        std::sort(cycle.begin(), cycle.end());
        std::string msg = "cycle through tokens";
        for (int member : cycle) msg += ' ' + std::to_string(member);
        add(ViolationKind::Cycle, cycle, msg);
      }
      for (int member : walk) state[member] = 2;
    }

    if (roots == 0)
      add(ViolationKind::RootCount, {}, "no token attaches to the root");
    else if (policy == RootPolicy::SingleRoot && roots != 1)
      add(ViolationKind::RootCount, {},
          std::to_string(roots) + " root attachments under a single-root policy");
  }

  std::int64_t prev_begin = -1;
  std::int64_t prev_end = -1;
  for (const Token& token : sentence.tokens) {
    if (!token.span) continue;
    if (token.span->begin_ms < prev_begin || token.span->begin_ms < prev_end) {
      add(ViolationKind::SpanOrder, {token.index},
          "time span of token " + std::to_string(token.index) +
              " overlaps or precedes an earlier span");
      break;
    }
    prev_begin = token.span->begin_ms;
    prev_end = token.span->end_ms;
  }

  return result;
}

Corpus parse_conllu(const std::string& text) {
  Corpus corpus;
  std::set<std::string> seen_ids;

  Sentence current;
  std::vector<int> token_lines;
  bool in_sentence = false;
  int line_no = 0;
  int sentence_first_line = 0;

  auto flush = [&]() {
    if (!in_sentence) return;
    if (current.sent_id.empty())
      current.sent_id = std::to_string(corpus.sentences.size() + 1);
    if (!seen_ids.insert(current.sent_id).second)
      throw ConlluError("duplicate sent_id", current.sent_id, sentence_first_line);
    validate_or_throw(current, sentence_first_line, token_lines);
    corpus.sentences.push_back(std::move(current));
    current = Sentence{};
    token_lines.clear();
    in_sentence = false;
  };

  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (line.empty()) {
      flush();
      continue;
    }
    if (!in_sentence) {
      in_sentence = true;
      sentence_first_line = line_no;
    }
    if (line[0] == '#') {
      const std::string prefix = "# sent_id = ";
      if (line.rfind(prefix, 0) == 0) current.sent_id = line.substr(prefix.size());
      continue;  // other comments are not preserved
    }

    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 10)
      throw ConlluError("expected 10 tab-separated columns, got " +
                            std::to_string(cols.size()),
                        current.sent_id, line_no);

    std::int64_t index = 0;
    if (!parse_int(cols[0], index))
      throw ConlluError("unsupported token id '" + cols[0] +
                            "' (multiword ranges and empty nodes are not supported)",
                        current.sent_id, line_no);
    std::int64_t head = 0;
    if (!parse_int(cols[6], head))
      throw ConlluError("non-integer head '" + cols[6] + "'", current.sent_id, line_no);

    Token token;
    token.index = static_cast<int>(index);
    token.form = cols[1];
    token.lemma = cols[2];
    token.upos = cols[3];
    token.xpos = cols[4];
    token.feats = cols[5];
    token.head = static_cast<int>(head);
    token.deprel = cols[7];
    token.deps = cols[8];
    split_misc(cols[9], current.sent_id, line_no, token.span, token.misc);

    if (token.form.empty() || has_whitespace(token.form))
      throw ConlluError("empty or whitespace-containing form", current.sent_id, line_no);
    if (token.index != current.size() + 1)
      throw ConlluError("token id " + cols[0] + " out of sequence",
                        current.sent_id, line_no);
    current.tokens.push_back(std::move(token));
    token_lines.push_back(line_no);
  }
  flush();
  return corpus;
}

std::string write_conllu(const Sentence& sentence) {
  std::string out = "# sent_id = " + sentence.sent_id + "\n";
  for (const Token& token : sentence.tokens) {
    out += std::to_string(token.index);
    out += '\t';
    out += token.form;
    out += '\t';
    out += token.lemma;
    out += '\t';
    out += token.upos;
    out += '\t';
    out += token.xpos;
    out += '\t';
    out += token.feats;
    out += '\t';
    out += std::to_string(token.head);
    out += '\t';
    out += token.deprel;
    out += '\t';
    out += token.deps;
    out += '\t';
    out += join_misc(token);
    out += '\n';
  }
  out += '\n';
  return out;
}

std::string write_conllu(const Corpus& corpus) {
  std::string out;
  for (const Sentence& sentence : corpus.sentences) out += write_conllu(sentence);
  return out;
}

}  // namespace speechdep
