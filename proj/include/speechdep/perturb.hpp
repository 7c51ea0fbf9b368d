#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "speechdep/treebank.hpp"

namespace speechdep {

// Token-level corruption rates for simulating recognition errors on a gold
// corpus. Per token, one draw decides delete/substitute/keep; a separate
// draw decides whether a filler token is inserted before it. Draws are
// keyed by (seed, sentence, token) so corruptions nest across rates: every
// token deleted at rate r is also deleted at any rate r' > r under the
// same seed.
struct PerturbSpec {
  double sub_rate = 0.0;
  double ins_rate = 0.0;
  double del_rate = 0.0;
  double char_noise_rate = 0.0;  // per-character noise within substitutions
  std::uint64_t seed = 0;
};

// Applies the corruption, keeping trees well-formed: dependents of a
// deleted token reattach to its head; when a root is deleted its leftmost
// dependent is promoted and the siblings attach to the promoted token.
// Inserted fillers attach to their left neighbour (the root if first) and
// carry upos X. Deterministic given the spec; zero rates reproduce the
// input exactly.
Corpus perturb_corpus(const Corpus& corpus, const PerturbSpec& spec);

// The deletion rule on its own: drops the marked tokens (1-based indices),
// percolating dependents to the deleted token's head and promoting the
// leftmost dependent of a deleted root. Surviving tokens are reindexed.
Sentence remove_tokens(const Sentence& sentence, const std::vector<bool>& removed);

struct CorpusStats {
  std::int64_t sentences = 0;
  std::int64_t tokens = 0;
  std::map<std::string, std::int64_t> upos_counts;
  std::map<std::string, std::int64_t> deprel_counts;
  std::map<int, std::int64_t> root_arity;  // head-0 count -> sentences
  std::int64_t projective_sentences = 0;

  double projectivity_rate() const {
    return sentences == 0 ? 1.0
                          : static_cast<double>(projective_sentences) /
                                static_cast<double>(sentences);
  }
};

CorpusStats corpus_stats(const Corpus& corpus);

// A tree is projective when every token between a head and its dependent
// is a descendant of that head.
bool is_projective(const Sentence& sentence);

}  // namespace speechdep
