#include <doctest.h>

#include <cmath>
#include <random>

#include "speechdep/ctc.hpp"
#include "testutil.hpp"

using namespace speechdep;

namespace {

// c a t <space> o k <blank>
SymbolTable letters() {
  return make_symbol_table({"c", "a", "t", kSpaceSymbol, "o", "k", kBlankSymbol});
}

FramePosterior one_hot(const SymbolTable& vocab, const std::vector<int>& path) {
  FramePosterior posterior;
  posterior.vocab = vocab;
  posterior.logits = Eigen::MatrixXd::Constant(path.size(), vocab.size(), -10.0);
  for (std::size_t t = 0; t < path.size(); ++t) posterior.logits(t, path[t]) = 0.0;
  return posterior;
}

}  // namespace

TEST_CASE("symbol tables require the reserved names") {
  CHECK_THROWS_AS(make_symbol_table({"a", kBlankSymbol}), std::invalid_argument);
  CHECK_THROWS_AS(make_symbol_table({"a", kSpaceSymbol}), std::invalid_argument);
  const SymbolTable table = letters();
  CHECK(table.blank == 6);
  CHECK(table.space == 3);
}

TEST_CASE("greedy path picks the per-frame argmax") {
  const SymbolTable vocab = letters();
  const FramePosterior posterior = one_hot(vocab, {0, 6, 2});
  CHECK(ctc_greedy_path(posterior) == std::vector<int>{0, 6, 2});
}

TEST_CASE("greedy path ties go to the lowest symbol index") {
  FramePosterior posterior;
  posterior.vocab = letters();
  posterior.logits = Eigen::MatrixXd::Zero(4, posterior.vocab.size());
  CHECK(ctc_greedy_path(posterior) == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("greedy path matches a row-wise scan") {
  std::mt19937_64 rng(71);
  FramePosterior posterior;
  posterior.vocab = make_symbol_table({kBlankSymbol, "x", "y", kSpaceSymbol});
  posterior.logits = Eigen::MatrixXd::Random(5, 4);
  const std::vector<int> path = ctc_greedy_path(posterior);
  for (int t = 0; t < 5; ++t) {
    int best = 0;
    for (int v = 1; v < 4; ++v)
      if (posterior.logits(t, v) > posterior.logits(t, best)) best = v;
    CHECK(path[t] == best);
  }
  (void)rng;
}

TEST_CASE("collapse fixtures") {
  const SymbolTable vocab = letters();
  const int c = 0, a = 1, t = 2, SP = 3, B = 6;
  CHECK(ctc_collapse({c, c, B, a, a, t}, vocab) == "cat");
  CHECK(ctc_collapse({B, B}, vocab) == "");
  CHECK(ctc_collapse({a, B, a}, vocab) == "aa");
  CHECK(ctc_collapse({c, a, t, SP, B, 4, 5}, vocab) == "cat ok");
  CHECK(ctc_collapse({SP, B, SP}, vocab) == "");
  CHECK(ctc_collapse({SP, a, SP, SP, t}, vocab) == "a t");
}

TEST_CASE("word spans: the cat/ok fixture") {
  const SymbolTable vocab = letters();
  const std::vector<WordSpan> spans =
      extract_word_spans({0, 1, 2, 3, 6, 4, 5}, vocab);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == WordSpan{"cat", 0, 2});
  CHECK(spans[1] == WordSpan{"ok", 5, 6});
}

TEST_CASE("word spans: all-blank paths have none") {
  CHECK(extract_word_spans({6, 6, 6}, letters()).empty());
  CHECK(extract_word_spans({}, letters()).empty());
}

TEST_CASE("word spans absorb internal blanks") {
  const SymbolTable vocab = letters();
  const std::vector<WordSpan> spans = extract_word_spans({1, 6, 2}, vocab);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == WordSpan{"at", 0, 2});
}

TEST_CASE("word spans exclude leading and trailing blanks") {
  const SymbolTable vocab = letters();
  const std::vector<WordSpan> spans = extract_word_spans({6, 1, 6, 3, 6, 2, 6}, vocab);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == WordSpan{"a", 1, 1});
  CHECK(spans[1] == WordSpan{"t", 5, 5});
}

TEST_CASE("repeated symbols extend the span through their whole run") {
  const SymbolTable vocab = letters();
  const std::vector<WordSpan> spans = extract_word_spans({0, 0, 1, 2, 2}, vocab);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == WordSpan{"cat", 0, 4});
}

TEST_CASE("span words joined by separators equal the collapse") {
  std::mt19937_64 rng(73);
  const SymbolTable vocab = letters();
  for (int trial = 0; trial < 500; ++trial) {
    const int T = testutil::uniform_int(rng, 1, 30);
    std::vector<int> path(T);
    for (int t = 0; t < T; ++t) path[t] = testutil::uniform_int(rng, 0, 6);

    const std::vector<WordSpan> spans = extract_word_spans(path, vocab);
    std::string joined;
    for (const WordSpan& span : spans) {
      if (!joined.empty()) joined += ' ';
      joined += span.word;
    }
    CHECK(joined == ctc_collapse(path, vocab));

    // Disjoint, ordered, and covering every character-emitting frame.
    int previous_end = -1;
    for (const WordSpan& span : spans) {
      CHECK(span.begin_frame > previous_end);
      CHECK(span.begin_frame <= span.end_frame);
      previous_end = span.end_frame;
    }
    for (int t = 0; t < T; ++t) {
      if (path[t] == vocab.blank || path[t] == vocab.space) continue;
      bool covered = false;
      for (const WordSpan& span : spans)
        covered |= span.begin_frame <= t && t <= span.end_frame;
      CHECK(covered);
    }
  }
}

TEST_CASE("timestamp spans: floor arithmetic and widening") {
  std::vector<Token> tokens(1);
  tokens[0].form = "mot";
  tokens[0].span = TimeSpan{0, 480};
  const std::vector<WordSpan> spans = spans_from_timestamps(tokens, 50.0, 100);
  CHECK(spans[0] == WordSpan{"mot", 0, 24});

  tokens[0].span = TimeSpan{0, 0};
  CHECK(spans_from_timestamps(tokens, 50.0, 100)[0] == WordSpan{"mot", 0, 0});

  tokens[0].span = TimeSpan{3000, 3100};
  CHECK_THROWS_AS(spans_from_timestamps(tokens, 50.0, 100), std::out_of_range);

  tokens[0].span.reset();
  CHECK_THROWS_AS(spans_from_timestamps(tokens, 50.0, 100), std::invalid_argument);
  tokens[0].span = TimeSpan{0, 100};
  CHECK_THROWS_AS(spans_from_timestamps(tokens, 0.0, 100), std::invalid_argument);
}

TEST_CASE("timestamp spans clamp to the signal end") {
  std::vector<Token> tokens(1);
  tokens[0].form = "fin";
  tokens[0].span = TimeSpan{1900, 5000};
  CHECK(spans_from_timestamps(tokens, 50.0, 100)[0] == WordSpan{"fin", 95, 99});
}

TEST_CASE("timestamp spans are monotone in begin_ms") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Token> tokens;
    std::int64_t clock = 0;
    for (int i = 0; i < 6; ++i) {
      Token token;
      token.form = "w" + std::to_string(i);
      const std::int64_t len = testutil::uniform_int(rng, 0, 300);
      token.span = TimeSpan{clock, clock + len};
      clock += len + testutil::uniform_int(rng, 1, 100);
      tokens.push_back(std::move(token));
    }
    const std::vector<WordSpan> spans = spans_from_timestamps(tokens, 50.0, 1000);
    for (std::size_t i = 1; i < spans.size(); ++i)
      CHECK(spans[i].begin_frame >= spans[i - 1].begin_frame);
  }
}

TEST_CASE("mean pooling of identical rows returns that row") {
  Eigen::MatrixXd frames(4, 3);
  frames << 1, 2, 3, 1, 2, 3, 1, 2, 3, 9, 9, 9;
  const Eigen::MatrixXd pooled =
      pool_word_vectors(frames, {{"w", 0, 2}}, MeanPooling{});
  CHECK(pooled.row(0) == frames.row(0));
}

TEST_CASE("last pooling returns the final row of the span") {
  Eigen::MatrixXd frames(4, 2);
  frames << 0, 0, 1, 1, 2, 2, 3, 3;
  const Eigen::MatrixXd pooled =
      pool_word_vectors(frames, {{"w", 0, 2}}, LastPooling{});
  CHECK(pooled.row(0) == frames.row(2));
}

TEST_CASE("recurrent pooling with zero weights collapses to zero") {
  const int d = 3, H = 2;
  LstmParams params;
  params.w_input = Eigen::MatrixXd::Zero(4 * H, d);
  params.w_hidden = Eigen::MatrixXd::Zero(4 * H, H);
  params.bias = Eigen::VectorXd::Zero(4 * H);
  const Eigen::MatrixXd frames = Eigen::MatrixXd::Random(5, d);
  const Eigen::MatrixXd pooled =
      pool_word_vectors(frames, {{"w", 0, 4}}, RecurrentPooling{params});
  CHECK(pooled.row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("recurrent pooling matches a scalar-loop reference") {
  std::mt19937_64 rng(83);
  const int d = 3, H = 2, T = 4;
  auto draw = [&rng]() { return testutil::uniform(rng) - 0.5; };

  LstmParams params;
  params.w_input.resize(4 * H, d);
  params.w_hidden.resize(4 * H, H);
  params.bias.resize(4 * H);
  for (int r = 0; r < 4 * H; ++r) {
    for (int c = 0; c < d; ++c) params.w_input(r, c) = draw();
    for (int c = 0; c < H; ++c) params.w_hidden(r, c) = draw();
    params.bias[r] = draw();
  }
  Eigen::MatrixXd frames(T, d);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < d; ++c) frames(t, c) = draw();

  // Reference: plain loops over the cell equations.
  std::vector<double> h(H, 0.0), cell(H, 0.0);
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  for (int t = 0; t < T; ++t) {
    std::vector<double> pre(4 * H, 0.0);
    for (int r = 0; r < 4 * H; ++r) {
      for (int c = 0; c < d; ++c) pre[r] += params.w_input(r, c) * frames(t, c);
      for (int c = 0; c < H; ++c) pre[r] += params.w_hidden(r, c) * h[c];
      pre[r] += params.bias[r];
    }
    std::vector<double> next_h(H);
    for (int k = 0; k < H; ++k) {
      const double ig = sigmoid(pre[k]);
      const double fg = sigmoid(pre[H + k]);
      const double gg = std::tanh(pre[2 * H + k]);
      const double og = sigmoid(pre[3 * H + k]);
      cell[k] = fg * cell[k] + ig * gg;
      next_h[k] = og * std::tanh(cell[k]);
    }
    h = next_h;
  }

  const Eigen::MatrixXd pooled =
      pool_word_vectors(frames, {{"w", 0, T - 1}}, RecurrentPooling{params});
  for (int k = 0; k < H; ++k) CHECK(pooled(0, k) == doctest::Approx(h[k]).epsilon(1e-12));
}

TEST_CASE("mean pooling ignores the order of rows within a span") {
  std::mt19937_64 rng(87);
  Eigen::MatrixXd frames = Eigen::MatrixXd::Random(6, 3);
  Eigen::MatrixXd shuffled = frames;
  for (int i = 5; i > 0; --i)
    shuffled.row(i).swap(shuffled.row(testutil::uniform_int(rng, 0, i)));
  const std::vector<WordSpan> spans = {{"w", 0, 5}};
  const Eigen::MatrixXd a = pool_word_vectors(frames, spans, MeanPooling{});
  const Eigen::MatrixXd b = pool_word_vectors(shuffled, spans, MeanPooling{});
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mean pooling is bounded by the span's envelope") {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    const int T = testutil::uniform_int(rng, 1, 8);
    Eigen::MatrixXd frames = Eigen::MatrixXd::Random(T, 4);
    const std::vector<WordSpan> spans = {{"w", 0, T - 1}};
    const Eigen::MatrixXd pooled = pool_word_vectors(frames, spans, MeanPooling{});
    for (int c = 0; c < 4; ++c) {
      CHECK(pooled(0, c) >= frames.col(c).minCoeff() - 1e-12);
      CHECK(pooled(0, c) <= frames.col(c).maxCoeff() + 1e-12);
    }
  }
}

TEST_CASE("pooling rejects out-of-range spans") {
  const Eigen::MatrixXd frames = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS(pool_word_vectors(frames, {{"w", 0, 3}}, MeanPooling{}),
                  std::out_of_range);
  CHECK_THROWS_AS(pool_word_vectors(frames, {{"w", 2, 1}}, LastPooling{}),
                  std::out_of_range);
}
