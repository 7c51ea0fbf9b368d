#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace speechdep {

// Word-level time boundaries in milliseconds, typically obtained from
// forced alignment. Serialized into the MISC column as
// AlignBegin=<int>|AlignEnd=<int>.
struct TimeSpan {
  std::int64_t begin_ms = 0;
  std::int64_t end_ms = 0;

  bool operator==(const TimeSpan&) const = default;
};

// One token of a dependency-annotated utterance. `index` is 1-based;
// `head` is in [0, n] with 0 the virtual root. The lemma/xpos/feats/deps
// columns are carried as opaque strings and take part in no computation.
struct Token {
  int index = 0;
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  int head = 0;
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";  // MISC leftovers after AlignBegin/AlignEnd extraction
  std::optional<TimeSpan> span;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string sent_id;
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::vector<Sentence> sentences;

  bool operator==(const Corpus&) const = default;
};

// Root arity accepted by validation and decoding. Spontaneous spoken
// utterances may carry several head-0 attachments, so MultiRoot is the
// default everywhere a policy is taken.
enum class RootPolicy { SingleRoot, MultiRoot };

enum class ViolationKind {
  IndexSequence,   // token indices are not exactly 1..n
  EmptyForm,       // empty form, or form containing whitespace
  HeadRange,       // head outside [0, n]
  SelfHead,        // head == index
  Cycle,           // head chain never reaches the root
  RootCount,       // number of head-0 tokens conflicts with the policy
  SpanOrder,       // time spans overlap or decrease
};

struct Violation {
  ViolationKind kind;
  std::vector<int> tokens;  // offending token indices, if any
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
};

// Checks all Sentence invariants plus the root-count policy. A sentence
// with zero tokens is accepted (hypothesis corpora may contain utterances
// whose every token was deleted).
ValidationResult validate_tree(const Sentence& sentence,
                               RootPolicy policy = RootPolicy::MultiRoot);

// Raised on malformed input; carries the sentence id and the 1-based line
// number of the offending record when known.
class ConlluError : public std::runtime_error {
 public:
  ConlluError(const std::string& what, std::string sent_id, int line);

  const std::string& sent_id() const { return sent_id_; }
  int line() const { return line_; }

 private:
  std::string sent_id_;
  int line_;
};

// Reads tab-separated 10-column CoNLL-U-like text. Supported surface:
// `# sent_id = ...` comments, blank-line sentence separation, `_`
// placeholders, MISC AlignBegin/AlignEnd keys. Multiword ranges (1-2) and
// empty nodes (1.1) are rejected. Sentences without an explicit sent_id
// get their 1-based ordinal as id. Every sentence is validated.
Corpus parse_conllu(const std::string& text);

// Inverse of parse_conllu: emits one `# sent_id = ...` line plus the
// 10-column records per sentence, each block followed by a blank line.
// parse_conllu(write_conllu(c)) == c for any valid corpus.
std::string write_conllu(const Corpus& corpus);

std::string write_conllu(const Sentence& sentence);

}  // namespace speechdep
