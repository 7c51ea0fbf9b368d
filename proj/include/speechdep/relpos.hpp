#pragma once

#include <string>
#include <vector>

#include "speechdep/treebank.hpp"

namespace speechdep {

// The reserved tag naming the virtual root in relative-position labels.
inline constexpr const char* kRootTag = "ROOT";

// One ±k@POS tag locating a token's head as the k-th element of POS
// category `pos`, counting to the left (negative) or right (positive).
// The virtual root counts as a ROOT-tagged element sitting at position 0,
// so a plain root attachment renders as -1@ROOT.
struct RelPosLabel {
  int offset = 0;  // never 0
  std::string pos;

  std::string render() const;
  static RelPosLabel parse(const std::string& text);

  bool operator==(const RelPosLabel&) const = default;
};

// Encodes a validated tree as one label per token. For token i with head
// h > 0 tagged P, the offset is the count of P-tagged elements between i
// and h, inclusive of h, signed by direction; head 0 yields -1@ROOT (or
// -k@ROOT when real ROOT-tagged tokens intervene).
std::vector<RelPosLabel> encode_relpos(const Sentence& sentence);

// Decodes labels back into heads, repairing ill-formed sequences:
//   (a) an unresolvable label attaches to the root;
//   (b) if nothing attaches to the root, the first token does;
//   (c) each cycle is broken by re-rooting its lowest-index member;
//   (d) under SingleRoot, extra roots reattach to the leftmost root.
// The result always passes validate_tree under the given policy. Deprels
// are left as "_": relation labels travel beside the codec, not in it.
Sentence decode_relpos(const std::vector<RelPosLabel>& labels,
                       const std::vector<std::string>& pos_tags,
                       const std::vector<std::string>& forms,
                       RootPolicy policy = RootPolicy::MultiRoot);

// The exact set of labels encode_relpos produces over the corpus, sorted
// by rendered form.
std::vector<RelPosLabel> label_vocabulary(const Corpus& corpus);

}  // namespace speechdep
