#include "speechdep/relpos.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace speechdep {

std::string RelPosLabel::render() const {
  std::string out = offset < 0 ? "-" : "+";
  out += std::to_string(offset < 0 ? -offset : offset);
  out += '@';
  out += pos;
  return out;
}

RelPosLabel RelPosLabel::parse(const std::string& text) {
  std::size_t at = text.find('@');
  if (text.size() < 4 || (text[0] != '+' && text[0] != '-') ||
      at == std::string::npos || at < 2 || at + 1 == text.size())
    throw std::invalid_argument("unparseable relative-position label '" + text + "'");
  int magnitude = 0;
  const char* first = text.data() + 1;
  const char* last = text.data() + at;
  auto [ptr, ec] = std::from_chars(first, last, magnitude);
  if (ec != std::errc() || ptr != last || magnitude <= 0)
    throw std::invalid_argument("unparseable relative-position label '" + text + "'");
  RelPosLabel label;
  label.offset = text[0] == '-' ? -magnitude : magnitude;
  label.pos = text.substr(at + 1);
  return label;
}

std::vector<RelPosLabel> encode_relpos(const Sentence& sentence) {
  const int n = sentence.size();
  std::vector<RelPosLabel> labels;
  labels.reserve(n);

  auto upos_at = [&](int position) -> const std::string& {
    static const std::string root_tag = kRootTag;
    return position == 0 ? root_tag : sentence.tokens[position - 1].upos;
  };

  for (int i = 1; i <= n; ++i) {
    const int head = sentence.tokens[i - 1].head;
    RelPosLabel label;
    label.pos = upos_at(head);
    if (head < i) {
      // Count P-tagged elements in [head, i) — the virtual root at
      // position 0 counts as ROOT-tagged.
      int count = 0;
      for (int j = i - 1; j >= head; --j)
        if (upos_at(j) == label.pos) ++count;
      label.offset = -count;
    } else {
      int count = 0;
      for (int j = i + 1; j <= head; ++j)
        if (upos_at(j) == label.pos) ++count;
      label.offset = count;
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

namespace {

// Resolves ±k@P for token i, or -1 when no k-th P-tagged element exists
// in that direction.
int resolve_label(const RelPosLabel& label, const std::vector<std::string>& pos_tags,
                  int i) {
  const int n = static_cast<int>(pos_tags.size());
  int remaining = label.offset < 0 ? -label.offset : label.offset;
  if (label.offset < 0) {
    for (int j = i - 1; j >= 1; --j) {
      if (pos_tags[j - 1] == label.pos && --remaining == 0) return j;
    }
    if (label.pos == kRootTag && --remaining == 0) return 0;
  } else {
    for (int j = i + 1; j <= n; ++j) {
      if (pos_tags[j - 1] == label.pos && --remaining == 0) return j;
    }
  }
  return -1;
}

}  // namespace

Sentence decode_relpos(const std::vector<RelPosLabel>& labels,
                       const std::vector<std::string>& pos_tags,
                       const std::vector<std::string>& forms, RootPolicy policy) {
  const int n = static_cast<int>(labels.size());
  if (n == 0) throw std::invalid_argument("cannot decode an empty label sequence");
  if (pos_tags.size() != labels.size() || forms.size() != labels.size())
    throw std::invalid_argument("labels, POS tags and forms differ in length");

  std::vector<int> heads(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    int head = resolve_label(labels[i - 1], pos_tags, i);
    heads[i] = head < 0 ? 0 : head;  // repair (a): unresolvable → root
  }

  // Repair (b): guarantee a root attachment.
  if (std::find(heads.begin() + 1, heads.end(), 0) == heads.end()) heads[1] = 0;

  // Repair (c): break every cycle at its lowest-index member. Cycles in a
  // head function are vertex-disjoint, so one sweep suffices.
  {
    std::vector<int> state(n + 1, 0);  // 0 unknown, 1 on walk, 2 resolved
    state[0] = 2;
    for (int start = 1; start <= n; ++start) {
      if (state[start] != 0) continue;
      std::vector<int> walk;
      int node = start;
      while (state[node] == 0) {
        state[node] = 1;
        walk.push_back(node);
        node = heads[node];
      }
      if (state[node] == 1) {
        auto begin = std::find(walk.begin(), walk.end(), node);
        heads[*std::min_element(begin, walk.end())] = 0;
      }
      for (int member : walk) state[member] = 2;
    }
  }

  // Repair (d): merge extra roots under the leftmost one.
  if (policy == RootPolicy::SingleRoot) {
    int leftmost = 0;
    for (int i = 1; i <= n; ++i) {
      if (heads[i] != 0) continue;
      if (leftmost == 0)
        leftmost = i;
      else
        heads[i] = leftmost;
    }
  }

  Sentence sentence;
  sentence.tokens.reserve(n);
  for (int i = 1; i <= n; ++i) {
    Token token;
    token.index = i;
    token.form = forms[i - 1];
    token.upos = pos_tags[i - 1];
    token.head = heads[i];
    sentence.tokens.push_back(std::move(token));
  }
  return sentence;
}

std::vector<RelPosLabel> label_vocabulary(const Corpus& corpus) {
  std::vector<RelPosLabel> vocabulary;
  for (const Sentence& sentence : corpus.sentences) {
    std::vector<RelPosLabel> labels = encode_relpos(sentence);
    vocabulary.insert(vocabulary.end(), labels.begin(), labels.end());
  }
  std::sort(vocabulary.begin(), vocabulary.end(),
            [](const RelPosLabel& a, const RelPosLabel& b) {
              return a.render() < b.render();
            });
  vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()),
                   vocabulary.end());
  return vocabulary;
}

}  // namespace speechdep
