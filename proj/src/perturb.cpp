#include "speechdep/perturb.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace speechdep {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based per-token randomness: draw k of token (s, t) depends only
// on (seed, s, t, k), never on other tokens' outcomes. That keeps outputs
// deterministic under --jobs and makes corruptions nest across rates.
struct TokenRng {
  std::uint64_t base;

  TokenRng(std::uint64_t seed, std::uint64_t sentence, std::uint64_t token)
      : base(splitmix64(splitmix64(splitmix64(seed) ^ sentence) ^ token)) {}

  std::uint64_t bits(std::uint64_t draw) const { return splitmix64(base + draw); }
  double uniform(std::uint64_t draw) const {
    return static_cast<double>(bits(draw) >> 11) * 0x1.0p-53;
  }
};

// Draw indices within a token's stream.
constexpr std::uint64_t kDrawOp = 0;
constexpr std::uint64_t kDrawInsert = 1;
constexpr std::uint64_t kDrawFiller = 2;
constexpr std::uint64_t kDrawCharBase = 16;

const std::array<const char*, 5> kFillerForms = {"euh", "hum", "ben", "hein", "quoi"};

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Per-byte noise on ASCII alphanumerics only, leaving multi-byte UTF-8
// sequences intact.
std::string noisy_form(const std::string& form, double char_noise_rate,
                       const TokenRng& rng) {
  std::string out = form;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!is_ascii_alnum(out[i])) continue;
    if (rng.uniform(kDrawCharBase + 2 * i) < char_noise_rate)
      out[i] = static_cast<char>('a' + rng.bits(kDrawCharBase + 2 * i + 1) % 26);
  }
  return out;
}

// Heads after deleting the marked tokens, still in original indexing.
// Deletions apply one at a time, ascending, rewiring dependents so the
// surviving head function never points at a deleted token. Promotion only
// ever picks a surviving dependent; with none left, the whole sibling set
// roots itself and any deleted members re-percolate at their own turn.
std::vector<int> rewire_heads(const Sentence& sentence, const std::vector<bool>& removed) {
  const int n = sentence.size();
  std::vector<int> head(n + 1, 0);
  for (int i = 1; i <= n; ++i) head[i] = sentence.tokens[i - 1].head;
  for (int t = 1; t <= n; ++t) {
    if (!removed[t]) continue;
    const int target = head[t];
    if (target != 0) {
      for (int j = 1; j <= n; ++j)
        if (j != t && head[j] == t) head[j] = target;
    } else {
      int promoted = 0;
      for (int j = 1; j <= n; ++j)
        if (j != t && head[j] == t && !removed[j]) {
          promoted = j;
          break;
        }
      for (int j = 1; j <= n; ++j)
        if (j != t && head[j] == t) head[j] = j == promoted ? 0 : promoted;
    }
  }
  return head;
}

Sentence perturb_sentence(const Sentence& sentence, const PerturbSpec& spec,
                          std::uint64_t sentence_index) {
  const int n = sentence.size();
  enum class Op { Keep, Substitute, Delete };
  std::vector<Op> op(n + 1, Op::Keep);
  std::vector<bool> removed(n + 1, false);
  std::vector<bool> insert_before(n + 1, false);
  std::vector<std::string> new_form(n + 1);
  std::vector<std::string> filler_form(n + 1);

  for (int i = 1; i <= n; ++i) {
    TokenRng rng(spec.seed, sentence_index, static_cast<std::uint64_t>(i));
    const double u = rng.uniform(kDrawOp);
    if (u < spec.del_rate) {
      op[i] = Op::Delete;
      removed[i] = true;
    } else if (u < spec.del_rate + spec.sub_rate) {
      op[i] = Op::Substitute;
    }
    if (rng.uniform(kDrawInsert) < spec.ins_rate) {
      insert_before[i] = true;
      filler_form[i] = kFillerForms[rng.bits(kDrawFiller) % kFillerForms.size()];
    }
    new_form[i] = op[i] == Op::Substitute
                      ? noisy_form(sentence.tokens[i - 1].form, spec.char_noise_rate, rng)
                      : sentence.tokens[i - 1].form;
  }

  const std::vector<int> head = rewire_heads(sentence, removed);

  // Emit fillers and survivors, then remap heads to the new positions.
  Sentence out;
  out.sent_id = sentence.sent_id;
  std::vector<int> new_index(n + 1, 0);
  std::vector<int> filler_positions;
  for (int i = 1; i <= n; ++i) {
    if (insert_before[i]) {
      Token filler;
      filler.form = filler_form[i];
      filler.upos = "X";
      filler.deprel = "dis";
      out.tokens.push_back(std::move(filler));
      filler_positions.push_back(static_cast<int>(out.tokens.size()));
    }
    if (!removed[i]) {
      Token token = sentence.tokens[i - 1];
      token.form = new_form[i];
      out.tokens.push_back(std::move(token));
      new_index[i] = static_cast<int>(out.tokens.size());
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (new_index[i] == 0) continue;
    Token& token = out.tokens[new_index[i] - 1];
    token.index = new_index[i];
    token.head = head[i] == 0 ? 0 : new_index[head[i]];
  }
  for (int position : filler_positions) {
    Token& filler = out.tokens[position - 1];
    filler.index = position;
    filler.head = position - 1;  // left neighbour; 0 when first
  }
  return out;
}

}  // namespace

Sentence remove_tokens(const Sentence& sentence, const std::vector<bool>& removed) {
  const int n = sentence.size();
  if (static_cast<int>(removed.size()) != n + 1)
    throw std::invalid_argument("removal mask must have n+1 entries (slot 0 unused)");
  const std::vector<int> head = rewire_heads(sentence, removed);

  Sentence out;
  out.sent_id = sentence.sent_id;
  std::vector<int> new_index(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    if (removed[i]) continue;
    out.tokens.push_back(sentence.tokens[i - 1]);
    new_index[i] = static_cast<int>(out.tokens.size());
  }
  for (int i = 1; i <= n; ++i) {
    if (new_index[i] == 0) continue;
    Token& token = out.tokens[new_index[i] - 1];
    token.index = new_index[i];
    token.head = head[i] == 0 ? 0 : new_index[head[i]];
  }
  return out;
}

Corpus perturb_corpus(const Corpus& corpus, const PerturbSpec& spec) {
  if (spec.sub_rate < 0 || spec.ins_rate < 0 || spec.del_rate < 0 ||
      spec.char_noise_rate < 0 || spec.sub_rate > 1 || spec.ins_rate > 1 ||
      spec.del_rate > 1 || spec.char_noise_rate > 1)
    throw std::invalid_argument("perturbation rates must lie in [0, 1]");
  if (spec.sub_rate + spec.del_rate > 1.0)
    throw std::invalid_argument("sub_rate + del_rate must not exceed 1");

  Corpus out;
  out.sentences.reserve(corpus.sentences.size());
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s)
    out.sentences.push_back(
        perturb_sentence(corpus.sentences[s], spec, static_cast<std::uint64_t>(s)));
  return out;
}

bool is_projective(const Sentence& sentence) {
  const int n = sentence.size();
  auto is_descendant_of = [&](int node, int ancestor) {
    int steps = 0;
    while (node != 0 && steps++ <= n) {
      if (node == ancestor) return true;
      node = sentence.tokens[node - 1].head;
    }
    return ancestor == 0 && node == 0;
  };
  for (const Token& token : sentence.tokens) {
    const int h = token.head;
    const int d = token.index;
    const int lo = std::min(h, d);
    const int hi = std::max(h, d);
    for (int j = lo + 1; j < hi; ++j)
      if (!is_descendant_of(j, h)) return false;
  }
  return true;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.sentences = static_cast<std::int64_t>(corpus.sentences.size());
  for (const Sentence& sentence : corpus.sentences) {
    int roots = 0;
    for (const Token& token : sentence.tokens) {
      ++stats.tokens;
      ++stats.upos_counts[token.upos];
      ++stats.deprel_counts[token.deprel];
      if (token.head == 0) ++roots;
    }
    ++stats.root_arity[roots];
    if (is_projective(sentence)) ++stats.projective_sentences;
  }
  return stats;
}

}  // namespace speechdep
