#include "speechdep/eval.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace speechdep {

namespace {

std::string fold_case(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string maybe_fold(const std::string& s, bool case_fold) {
  return case_fold ? fold_case(s) : s;
}

bool forms_equal(const std::string& a, const std::string& b, bool case_fold) {
  if (!case_fold) return a == b;
  return fold_case(a) == fold_case(b);
}

// Unicode code points of a UTF-8 string; malformed bytes count as one code
// point each.
std::vector<std::uint32_t> utf8_codepoints(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char byte = static_cast<unsigned char>(s[i]);
    int extra = 0;
    std::uint32_t value = byte;
    if (byte >= 0xF0)
      extra = 3, value = byte & 0x07u;
    else if (byte >= 0xE0)
      extra = 2, value = byte & 0x0Fu;
    else if (byte >= 0xC0)
      extra = 1, value = byte & 0x1Fu;
    if (i + extra >= s.size()) extra = 0, value = byte;
    for (int k = 1; k <= extra; ++k) {
      const unsigned char cont = static_cast<unsigned char>(s[i + k]);
      if ((cont & 0xC0u) != 0x80u) {
        extra = 0;
        value = byte;
        break;
      }
      value = (value << 6) | (cont & 0x3Fu);
    }
    out.push_back(value);
    i += 1 + extra;
  }
  return out;
}

template <typename T>
std::int64_t edit_distance(const std::vector<T>& hyp, const std::vector<T>& ref) {
  const std::size_t n = hyp.size();
  std::vector<std::int64_t> previous(ref.size() + 1), current(ref.size() + 1);
  for (std::size_t j = 0; j <= ref.size(); ++j) previous[j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    current[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      const std::int64_t subst = previous[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      current[j] = std::min({subst, previous[j] + 1, current[j - 1] + 1});
    }
    std::swap(previous, current);
  }
  return previous[ref.size()];
}

}  // namespace

std::vector<AlignmentOp> levenshtein_align(const std::vector<std::string>& hyp_forms,
                                           const std::vector<std::string>& ref_forms,
                                           bool case_fold) {
  const int n = static_cast<int>(hyp_forms.size());
  const int m = static_cast<int>(ref_forms.size());

  // Full table: D[i][j] = cost of aligning hyp[0,i) with ref[0,j).
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 1; i <= n; ++i) cost[i][0] = i;
  for (int j = 1; j <= m; ++j) cost[0][j] = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int diag =
          cost[i - 1][j - 1] +
          (forms_equal(hyp_forms[i - 1], ref_forms[j - 1], case_fold) ? 0 : 1);
      const int del = cost[i][j - 1] + 1;   // ref token j unmatched
      const int ins = cost[i - 1][j] + 1;   // hyp token i unmatched
      cost[i][j] = std::min({diag, del, ins});
    }
  }

  // Backtrace, preferring diagonal, then delete, then insert.
  std::vector<AlignmentOp> ops;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    AlignmentOp op;
    if (i > 0 && j > 0 &&
        cost[i][j] ==
            cost[i - 1][j - 1] +
                (forms_equal(hyp_forms[i - 1], ref_forms[j - 1], case_fold) ? 0 : 1)) {
      op.kind = forms_equal(hyp_forms[i - 1], ref_forms[j - 1], case_fold)
                    ? EditKind::Match
                    : EditKind::Substitute;
      op.hyp_index = i--;
      op.ref_index = j--;
    } else if (j > 0 && cost[i][j] == cost[i][j - 1] + 1) {
      op.kind = EditKind::Delete;
      op.ref_index = j--;
    } else {
      op.kind = EditKind::Insert;
      op.hyp_index = i--;
    }
    ops.push_back(op);
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

double wer(const std::vector<std::string>& hyp_forms,
           const std::vector<std::string>& ref_forms, bool case_fold) {
  if (ref_forms.empty())
    throw std::invalid_argument("word error rate is undefined for an empty reference");
  std::vector<std::string> hyp = hyp_forms;
  std::vector<std::string> ref = ref_forms;
  if (case_fold) {
    for (std::string& s : hyp) s = fold_case(s);
    for (std::string& s : ref) s = fold_case(s);
  }
  return static_cast<double>(edit_distance(hyp, ref)) /
         static_cast<double>(ref.size());
}

double cer(const std::string& hyp_text, const std::string& ref_text, bool case_fold) {
  const std::vector<std::uint32_t> ref =
      utf8_codepoints(maybe_fold(ref_text, case_fold));
  if (ref.empty())
    throw std::invalid_argument("character error rate is undefined for an empty reference");
  const std::vector<std::uint32_t> hyp =
      utf8_codepoints(maybe_fold(hyp_text, case_fold));
  return static_cast<double>(edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

namespace {

std::vector<std::string> forms_of(const Sentence& sentence) {
  std::vector<std::string> forms;
  forms.reserve(sentence.tokens.size());
  for (const Token& token : sentence.tokens) forms.push_back(token.form);
  return forms;
}

std::string joined_forms(const Sentence& sentence) {
  std::string out;
  for (const Token& token : sentence.tokens) {
    if (!out.empty()) out += ' ';
    out += token.form;
  }
  return out;
}

}  // namespace

PaddedPair align_and_pad(const Sentence& hyp, const Sentence& ref, bool case_fold) {
  const std::vector<AlignmentOp> ops =
      levenshtein_align(forms_of(hyp), forms_of(ref), case_fold);

  // Old 1-based position -> 1-based padded slot, per side.
  std::vector<int> hyp_slot(hyp.tokens.size() + 1, 0);
  std::vector<int> ref_slot(ref.tokens.size() + 1, 0);
  for (std::size_t s = 0; s < ops.size(); ++s) {
    if (ops[s].hyp_index > 0) hyp_slot[ops[s].hyp_index] = static_cast<int>(s) + 1;
    if (ops[s].ref_index > 0) ref_slot[ops[s].ref_index] = static_cast<int>(s) + 1;
  }

  auto remap = [](const Token& token, const std::vector<int>& slot_of) {
    Token out = token;
    out.index = slot_of[token.index];
    out.head = token.head == 0 ? 0 : slot_of[token.head];
    return out;
  };

  PaddedPair pair;
  pair.hyp.reserve(ops.size());
  pair.ref.reserve(ops.size());
  for (const AlignmentOp& op : ops) {
    PaddedSlot hyp_side, ref_side;
    if (op.hyp_index > 0) {
      hyp_side.dummy = false;
      hyp_side.token = remap(hyp.tokens[op.hyp_index - 1], hyp_slot);
    }
    if (op.ref_index > 0) {
      ref_side.dummy = false;
      ref_side.token = remap(ref.tokens[op.ref_index - 1], ref_slot);
    }
    pair.hyp.push_back(std::move(hyp_side));
    pair.ref.push_back(std::move(ref_side));
  }
  return pair;
}

EvalCounts& EvalCounts::operator+=(const EvalCounts& other) {
  ref_tokens += other.ref_tokens;
  hyp_tokens += other.hyp_tokens;
  matches += other.matches;
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  correct_pos += other.correct_pos;
  correct_heads += other.correct_heads;
  correct_heads_and_labels += other.correct_heads_and_labels;
  char_edits += other.char_edits;
  ref_chars += other.ref_chars;
  return *this;
}

EvalCounts score_pair(const PaddedPair& pair, bool case_fold) {
  EvalCounts counts;
  for (int s = 0; s < pair.size(); ++s) {
    const PaddedSlot& hyp = pair.hyp[s];
    const PaddedSlot& ref = pair.ref[s];
    if (ref.dummy && hyp.dummy)
      throw std::invalid_argument("aligned slots may not both be dummies");
    if (ref.dummy) {
      ++counts.hyp_tokens;
      ++counts.insertions;
      continue;
    }
    ++counts.ref_tokens;
    if (hyp.dummy) {
      ++counts.deletions;
      continue;
    }
    ++counts.hyp_tokens;
    if (forms_equal(hyp.token.form, ref.token.form, case_fold))
      ++counts.matches;
    else
      ++counts.substitutions;
    if (hyp.token.upos == ref.token.upos) ++counts.correct_pos;
    if (hyp.token.head == ref.token.head) {
      ++counts.correct_heads;
      if (hyp.token.deprel == ref.token.deprel) ++counts.correct_heads_and_labels;
    }
  }
  return counts;
}

EvalReport report_from_counts(const EvalCounts& counts) {
  if (counts.ref_tokens == 0)
    throw std::invalid_argument("evaluation is undefined for an empty reference");
  EvalReport report;
  report.counts = counts;
  const double ref = static_cast<double>(counts.ref_tokens);
  report.wer = static_cast<double>(counts.substitutions + counts.insertions +
                                   counts.deletions) /
               ref;
  report.cer = counts.ref_chars == 0 ? 0.0
                                     : static_cast<double>(counts.char_edits) /
                                           static_cast<double>(counts.ref_chars);
  report.pos_acc = static_cast<double>(counts.correct_pos) / ref;
  report.uas = static_cast<double>(counts.correct_heads) / ref;
  report.las = static_cast<double>(counts.correct_heads_and_labels) / ref;
  return report;
}

namespace {

// Pairs hypothesis sentences to reference sentences by sent_id, in
// reference order. Ids must pair exactly.
std::vector<std::pair<const Sentence*, const Sentence*>> pair_by_id(
    const Corpus& hyp, const Corpus& ref) {
  std::map<std::string, const Sentence*> hyp_by_id;
  for (const Sentence& sentence : hyp.sentences)
    if (!hyp_by_id.emplace(sentence.sent_id, &sentence).second)
      throw std::invalid_argument("duplicate hypothesis sent_id '" + sentence.sent_id + "'");

  std::vector<std::pair<const Sentence*, const Sentence*>> pairs;
  std::map<std::string, int> ref_seen;
  for (const Sentence& sentence : ref.sentences) {
    if (++ref_seen[sentence.sent_id] > 1)
      throw std::invalid_argument("duplicate reference sent_id '" + sentence.sent_id + "'");
    auto it = hyp_by_id.find(sentence.sent_id);
    if (it == hyp_by_id.end())
      throw std::invalid_argument("reference sent_id '" + sentence.sent_id +
                                  "' missing from the hypothesis");
    pairs.emplace_back(it->second, &sentence);
  }
  if (pairs.size() != hyp.sentences.size())
    throw std::invalid_argument("hypothesis contains sentences absent from the reference");
  return pairs;
}

}  // namespace

EvalCounts evaluate_pair(const Sentence& hyp, const Sentence& ref, bool case_fold) {
  EvalCounts counts = score_pair(align_and_pad(hyp, ref, case_fold), case_fold);
  const std::string ref_text = maybe_fold(joined_forms(ref), case_fold);
  const std::string hyp_text = maybe_fold(joined_forms(hyp), case_fold);
  counts.char_edits +=
      edit_distance(utf8_codepoints(hyp_text), utf8_codepoints(ref_text));
  counts.ref_chars += static_cast<std::int64_t>(utf8_codepoints(ref_text).size());
  return counts;
}

EvalReport evaluate_corpus(const Corpus& hyp, const Corpus& ref, bool case_fold) {
  EvalCounts totals;
  for (auto [hyp_sentence, ref_sentence] : pair_by_id(hyp, ref))
    totals += evaluate_pair(*hyp_sentence, *ref_sentence, case_fold);
  return report_from_counts(totals);
}

EvalReport evaluate_standard(const Corpus& hyp, const Corpus& ref, bool case_fold) {
  EvalCounts totals;
  for (auto [hyp_sentence, ref_sentence] : pair_by_id(hyp, ref)) {
    if (hyp_sentence->size() != ref_sentence->size())
      throw std::invalid_argument(
          "sentence '" + ref_sentence->sent_id +
          "': sequence lengths differ; use the aligned evaluation instead");
    for (int i = 0; i < ref_sentence->size(); ++i) {
      const Token& h = hyp_sentence->tokens[i];
      const Token& r = ref_sentence->tokens[i];
      if (!forms_equal(h.form, r.form, case_fold))
        throw std::invalid_argument(
            "sentence '" + ref_sentence->sent_id + "', token " + std::to_string(i + 1) +
            ": forms differ; use the aligned evaluation instead");
      ++totals.ref_tokens;
      ++totals.hyp_tokens;
      ++totals.matches;
      if (h.upos == r.upos) ++totals.correct_pos;
      if (h.head == r.head) {
        ++totals.correct_heads;
        if (h.deprel == r.deprel) ++totals.correct_heads_and_labels;
      }
    }
    totals.ref_chars += static_cast<std::int64_t>(
        utf8_codepoints(maybe_fold(joined_forms(*ref_sentence), case_fold)).size());
  }
  return report_from_counts(totals);
}

}  // namespace speechdep
