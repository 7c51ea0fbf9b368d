#pragma once

#include <random>
#include <string>
#include <vector>

#include "speechdep/treebank.hpp"

namespace testutil {

// Draws are hand-rolled from the raw engine so fixtures stay identical
// across standard libraries.
inline double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline const std::vector<std::string>& pos_tags8() {
  static const std::vector<std::string> tags = {"ADJ", "ADV", "DET",  "NOUN",
                                                "PRON", "PROPN", "VERB", "X"};
  return tags;
}

inline const std::vector<std::string>& relations14() {
  static const std::vector<std::string> relations = {
      "root", "suj", "obj",   "mod",  "aux", "det", "dep",
      "coord", "para", "juxt", "comp", "att", "cc",  "spe"};
  return relations;
}

// Random valid tree: tokens attach in a shuffled order, each to a node
// already placed, so the result is always an arborescence with arcs in
// both directions. Forms are unique within the sentence.
inline speechdep::Sentence random_sentence(std::mt19937_64& rng, int n,
                                           bool multi_root = true) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[uniform_int(rng, 0, i)]);

  std::vector<int> heads(n + 1, 0);
  std::vector<int> placed;
  for (int k = 0; k < n; ++k) {
    const int node = order[k];
    if (k == 0) {
      heads[node] = 0;
    } else if (multi_root && uniform(rng) < 0.15) {
      heads[node] = 0;
    } else {
      heads[node] = placed[uniform_int(rng, 0, static_cast<int>(placed.size()) - 1)];
    }
    placed.push_back(node);
  }

  speechdep::Sentence sentence;
  for (int i = 1; i <= n; ++i) {
    speechdep::Token token;
    token.index = i;
    token.form = "w" + std::to_string(i);
    token.upos = pos_tags8()[uniform_int(rng, 0, 7)];
    token.head = heads[i];
    token.deprel = heads[i] == 0
                       ? "root"
                       : relations14()[uniform_int(rng, 1, 13)];
    sentence.tokens.push_back(std::move(token));
  }
  return sentence;
}

inline speechdep::Corpus random_corpus(std::mt19937_64& rng, int sentences,
                                       int max_len, bool multi_root = true) {
  speechdep::Corpus corpus;
  for (int s = 0; s < sentences; ++s) {
    speechdep::Sentence sentence =
        random_sentence(rng, uniform_int(rng, 1, max_len), multi_root);
    sentence.sent_id = "s" + std::to_string(s + 1);
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

}  // namespace testutil
