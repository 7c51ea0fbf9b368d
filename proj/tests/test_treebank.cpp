#include <doctest.h>

#include <random>

#include "speechdep/treebank.hpp"
#include "testutil.hpp"

using namespace speechdep;

namespace {

const char* kThreeTokens =
    "# sent_id = s1\n"
    "1\tle\tle\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tchat\tchat\tNOUN\t_\t_\t3\tsuj\t_\t_\n"
    "3\tdort\tdormir\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n";

Sentence make_sentence(const std::vector<int>& heads) {
  Sentence sentence;
  sentence.sent_id = "t";
  for (std::size_t i = 0; i < heads.size(); ++i) {
    Token token;
    token.index = static_cast<int>(i) + 1;
    token.form = "w" + std::to_string(i + 1);
    token.upos = "X";
    token.head = heads[i];
    sentence.tokens.push_back(std::move(token));
  }
  return sentence;
}

// Oracle for validate_tree: every token must reach node 0 by following
// heads without revisiting any node.
bool reaches_root_everywhere(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int start = 1; start <= n; ++start) {
    std::vector<bool> seen(n + 1, false);
    int node = start;
    while (node != 0) {
      if (node < 1 || node > n || seen[node]) return false;
      seen[node] = true;
      node = heads[node - 1];
    }
  }
  return true;
}

}  // namespace

TEST_CASE("parse_conllu maps fields of a simple sentence") {
  const Corpus corpus = parse_conllu(kThreeTokens);
  REQUIRE(corpus.sentences.size() == 1);
  const Sentence& s = corpus.sentences[0];
  CHECK(s.sent_id == "s1");
  REQUIRE(s.size() == 3);
  CHECK(s.tokens[0].form == "le");
  CHECK(s.tokens[0].head == 2);
  CHECK(s.tokens[1].head == 3);
  CHECK(s.tokens[2].head == 0);
  CHECK(s.tokens[2].upos == "VERB");
  CHECK(s.tokens[1].deprel == "suj");
}

TEST_CASE("parse_conllu of an empty string yields an empty corpus") {
  CHECK(parse_conllu("").sentences.empty());
}

TEST_CASE("parse_conllu rejects an out-of-range head with location info") {
  const std::string bad =
      "# sent_id = bad\n"
      "1\ta\t_\t_\t_\t_\t5\tdep\t_\t_\n"
      "2\tb\t_\t_\t_\t_\t1\tdep\t_\t_\n"
      "3\tc\t_\t_\t_\t_\t1\tdep\t_\t_\n";
  try {
    parse_conllu(bad);
    FAIL("expected ConlluError");
  } catch (const ConlluError& e) {
    CHECK(e.sent_id() == "bad");
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse_conllu error cases") {
  CHECK_THROWS_AS(parse_conllu("1\ta\t_\t_\t_\t_\t0\tdep\t_\n"), ConlluError);  // 9 cols
  CHECK_THROWS_AS(parse_conllu("1\ta\t_\t_\t_\t_\tX\tdep\t_\t_\n"), ConlluError);
  CHECK_THROWS_AS(
      parse_conllu("1\ta\t_\t_\t_\t_\t2\td\t_\t_\n1\tb\t_\t_\t_\t_\t0\td\t_\t_\n"),
      ConlluError);  // duplicate index
  CHECK_THROWS_AS(
      parse_conllu("1\ta\t_\t_\t_\t_\t2\td\t_\t_\n2\tb\t_\t_\t_\t_\t1\td\t_\t_\n"),
      ConlluError);  // cycle
  CHECK_THROWS_AS(parse_conllu("1-2\tdu\t_\t_\t_\t_\t0\td\t_\t_\n"), ConlluError);
  CHECK_THROWS_AS(parse_conllu("1\ta b\t_\t_\t_\t_\t0\td\t_\t_\n"), ConlluError);
  const std::string dup =
      "# sent_id = x\n1\ta\t_\t_\t_\t_\t0\td\t_\t_\n\n"
      "# sent_id = x\n1\tb\t_\t_\t_\t_\t0\td\t_\t_\n";
  CHECK_THROWS_AS(parse_conllu(dup), ConlluError);
}

TEST_CASE("write_conllu emits records plus a trailing blank line") {
  const Corpus corpus = parse_conllu(kThreeTokens);
  CHECK(write_conllu(corpus) == kThreeTokens);
  CHECK(write_conllu(Corpus{}) == "");
}

TEST_CASE("time spans ride in MISC as AlignBegin/AlignEnd") {
  Sentence s = make_sentence({0});
  s.tokens[0].span = TimeSpan{120, 480};
  const std::string text = write_conllu(Corpus{{s}});
  CHECK(text.find("AlignBegin=120|AlignEnd=480") != std::string::npos);

  const Corpus back = parse_conllu(text);
  REQUIRE(back.sentences[0].tokens[0].span.has_value());
  CHECK(back.sentences[0].tokens[0].span->begin_ms == 120);
  CHECK(back.sentences[0].tokens[0].span->end_ms == 480);

  // Other MISC payload survives next to the span keys.
  s.tokens[0].misc = "SpaceAfter=No";
  const Corpus back2 = parse_conllu(write_conllu(Corpus{{s}}));
  CHECK(back2.sentences[0].tokens[0].misc == "SpaceAfter=No");
  CHECK(back2.sentences[0].tokens[0].span == TimeSpan{120, 480});
}

TEST_CASE("comment-only blocks become empty sentences") {
  const Corpus corpus = parse_conllu("# sent_id = empty\n\n");
  REQUIRE(corpus.sentences.size() == 1);
  CHECK(corpus.sentences[0].tokens.empty());
  CHECK(write_conllu(corpus) == "# sent_id = empty\n\n");
}

TEST_CASE("validate_tree fixtures") {
  CHECK(validate_tree(make_sentence({2, 3, 0}), RootPolicy::SingleRoot).ok());

  const ValidationResult cycle = validate_tree(make_sentence({2, 1, 0}));
  REQUIRE_FALSE(cycle.ok());
  REQUIRE(cycle.violations.size() == 1);
  CHECK(cycle.violations[0].kind == ViolationKind::Cycle);
  CHECK(cycle.violations[0].tokens == std::vector<int>{1, 2});

  const ValidationResult two_roots =
      validate_tree(make_sentence({0, 0, 1}), RootPolicy::SingleRoot);
  REQUIRE_FALSE(two_roots.ok());
  CHECK(two_roots.violations[0].kind == ViolationKind::RootCount);
  CHECK(validate_tree(make_sentence({0, 0, 1}), RootPolicy::MultiRoot).ok());
}

TEST_CASE("validate_tree flags bad heads and spans") {
  CHECK_FALSE(validate_tree(make_sentence({4, 0})).ok());
  CHECK_FALSE(validate_tree(make_sentence({1, 0})).ok());  // self head
  CHECK_FALSE(validate_tree(make_sentence({2, 3, 1})).ok());  // no root, cycle

  Sentence s = make_sentence({0, 1});
  s.tokens[0].span = TimeSpan{100, 300};
  s.tokens[1].span = TimeSpan{200, 400};  // overlaps
  CHECK_FALSE(validate_tree(s).ok());
  s.tokens[1].span = TimeSpan{300, 400};
  CHECK(validate_tree(s).ok());

  CHECK(validate_tree(Sentence{}).ok());  // zero tokens: vacuous
}

TEST_CASE("validate_tree agrees with brute-force reachability") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = testutil::uniform_int(rng, 1, 8);
    std::vector<int> heads(n);
    for (int i = 0; i < n; ++i) {
      do {
        heads[i] = testutil::uniform_int(rng, 0, n);
      } while (heads[i] == i + 1);
    }
    const Sentence s = make_sentence(heads);
    CHECK(validate_tree(s).ok() == reaches_root_everywhere(heads));
  }
}

TEST_CASE("round-trip: parse(write(c)) == c on random corpora") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Corpus corpus = testutil::random_corpus(rng, 10, 12);
    // Sprinkle spans and opaque columns.
    for (Sentence& sentence : corpus.sentences) {
      std::int64_t clock = 0;
      for (Token& token : sentence.tokens) {
        if (testutil::uniform(rng) < 0.5) {
          const std::int64_t len = testutil::uniform_int(rng, 0, 400);
          token.span = TimeSpan{clock, clock + len};
          clock += len + testutil::uniform_int(rng, 1, 50);
        }
        if (testutil::uniform(rng) < 0.3) token.lemma = "lem" + token.form;
        if (testutil::uniform(rng) < 0.2) token.feats = "Number=Sing";
        if (testutil::uniform(rng) < 0.2) token.misc = "SpaceAfter=No";
      }
    }
    const Corpus back = parse_conllu(write_conllu(corpus));
    CHECK(back == corpus);
  }
}
