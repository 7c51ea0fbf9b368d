#include "speechdep/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>

#include "speechdep/ctc.hpp"
#include "speechdep/eval.hpp"
#include "speechdep/formats.hpp"
#include "speechdep/graph.hpp"
#include "speechdep/parallel.hpp"
#include "speechdep/perturb.hpp"
#include "speechdep/relpos.hpp"
#include "speechdep/treebank.hpp"

namespace speechdep::cli {

namespace {

using nlohmann::json;

struct GlobalOptions {
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string root_policy = "multi";
  bool json_output = false;

  RootPolicy policy() const {
    return root_policy == "single" ? RootPolicy::SingleRoot : RootPolicy::MultiRoot;
  }
};

std::string format_percent(double rate) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", rate * 100.0);
  return buffer;
}

void cmd_encode(const std::string& input, const std::string& output) {
  const Corpus corpus = parse_conllu(read_file(input));
  std::vector<LabeledSentence> blocks;
  blocks.reserve(corpus.sentences.size());
  for (const Sentence& sentence : corpus.sentences) {
    const std::vector<RelPosLabel> labels = encode_relpos(sentence);
    LabeledSentence block;
    block.sent_id = sentence.sent_id;
    for (int i = 0; i < sentence.size(); ++i) {
      const Token& token = sentence.tokens[i];
      block.tokens.push_back({token.form, token.upos, labels[i], token.deprel});
    }
    blocks.push_back(std::move(block));
  }
  write_file(output, write_label_file(blocks));
}

void cmd_decode(const std::string& input, const std::string& output,
                RootPolicy policy) {
  const std::vector<LabeledSentence> blocks = parse_label_file(read_file(input));
  Corpus corpus;
  corpus.sentences.reserve(blocks.size());
  for (const LabeledSentence& block : blocks) {
    Sentence sentence;
    if (!block.tokens.empty()) {
      std::vector<RelPosLabel> labels;
      std::vector<std::string> pos_tags, forms;
      for (const LabeledToken& token : block.tokens) {
        labels.push_back(token.label);
        pos_tags.push_back(token.pos);
        forms.push_back(token.form);
      }
      sentence = decode_relpos(labels, pos_tags, forms, policy);
      for (std::size_t i = 0; i < block.tokens.size(); ++i)
        sentence.tokens[i].deprel = block.tokens[i].deprel;
    }
    sentence.sent_id = block.sent_id;
    corpus.sentences.push_back(std::move(sentence));
  }
  write_file(output, write_conllu(corpus));
}

void cmd_parse(const std::string& scores_path, const std::string& tokens_path,
               const std::string& relations_path, const std::string& output,
               RootPolicy policy, int jobs) {
  const std::vector<ScoredSentence> scored = parse_score_file(read_file(scores_path));
  const std::vector<TokenizedSentence> tokens = parse_token_file(read_file(tokens_path));
  if (scored.size() != tokens.size())
    throw std::invalid_argument("score file has " + std::to_string(scored.size()) +
                                " sentences but token file has " +
                                std::to_string(tokens.size()));
  std::vector<std::string> relations;
  if (!relations_path.empty()) relations = parse_relation_file(read_file(relations_path));

  Corpus corpus;
  corpus.sentences.resize(scored.size());
  parallel_for(scored.size(), jobs, [&](std::size_t i) {
    const ScoredSentence& record = scored[i];
    const TokenizedSentence& sentence_tokens = tokens[i];
    if (record.sent_id != sentence_tokens.sent_id)
      throw std::invalid_argument("sentence order mismatch: scores for '" +
                                  record.sent_id + "' paired with tokens for '" +
                                  sentence_tokens.sent_id + "'");
    const int n = record.arcs.length();
    if (n != static_cast<int>(sentence_tokens.forms.size()))
      throw std::invalid_argument("sentence '" + record.sent_id + "': score matrix covers " +
                                  std::to_string(n) + " tokens but " +
                                  std::to_string(sentence_tokens.forms.size()) +
                                  " were provided");

    const std::vector<int> heads = decode_mst(record.arcs, policy);
    std::vector<std::string> deprels(n, "_");
    if (record.labels) {
      if (relations.empty())
        throw std::invalid_argument("sentence '" + record.sent_id +
                                    "' carries relation scores; pass --relations");
      deprels = assign_labels(heads, *record.labels, relations);
    }

    Sentence sentence;
    sentence.sent_id = record.sent_id;
    for (int t = 0; t < n; ++t) {
      Token token;
      token.index = t + 1;
      token.form = sentence_tokens.forms[t];
      token.upos = sentence_tokens.pos_tags[t];
      token.head = heads[t];
      token.deprel = deprels[t];
      sentence.tokens.push_back(std::move(token));
    }
    corpus.sentences[i] = std::move(sentence);
  });
  write_file(output, write_conllu(corpus));
}

std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

struct SegmentPaths {
  std::string posteriors, vocab, timestamps, transcript, output;
  std::string frames, weights, vectors;
  std::string pool = "mean";
  double frame_rate = 0.0;
};

void cmd_segment(const SegmentPaths& paths, int jobs) {
  const std::vector<PosteriorRecord> records =
      parse_posterior_file(read_file(paths.posteriors));
  const SymbolTable vocab = parse_vocab_file(read_file(paths.vocab));

  struct Segmented {
    std::string sent_id;
    std::vector<WordSpan> spans;
    std::string transcript;
  };
  std::vector<Segmented> results;

  if (paths.timestamps.empty()) {
    results.resize(records.size());
    parallel_for(records.size(), jobs, [&](std::size_t i) {
      FramePosterior posterior{vocab, records[i].logits};
      const std::vector<int> path = ctc_greedy_path(posterior);
      results[i] = {records[i].sent_id, extract_word_spans(path, vocab),
                    ctc_collapse(path, vocab)};
    });
  } else {
    if (paths.frame_rate <= 0.0)
      throw std::invalid_argument("--frame-rate must be positive with --timestamps");
    std::map<std::string, const PosteriorRecord*> by_id;
    for (const PosteriorRecord& record : records) by_id[record.sent_id] = &record;
    const Corpus timestamps = parse_conllu(read_file(paths.timestamps));
    results.resize(timestamps.sentences.size());
    parallel_for(timestamps.sentences.size(), jobs, [&](std::size_t i) {
      const Sentence& sentence = timestamps.sentences[i];
      auto it = by_id.find(sentence.sent_id);
      if (it == by_id.end())
        throw std::invalid_argument("no posteriors for sentence '" + sentence.sent_id + "'");
      const int frames = static_cast<int>(it->second->logits.rows());
      std::string transcript;
      for (const Token& token : sentence.tokens) {
        if (!transcript.empty()) transcript += ' ';
        transcript += token.form;
      }
      results[i] = {sentence.sent_id,
                    spans_from_timestamps(sentence.tokens, paths.frame_rate, frames),
                    std::move(transcript)};
    });
  }

  std::string span_text;
  std::string transcript_text;
  for (const Segmented& result : results) {
    span_text += "# sent_id = " + result.sent_id + '\n';
    for (const WordSpan& span : result.spans)
      span_text += span.word + '\t' + std::to_string(span.begin_frame) + '\t' +
                   std::to_string(span.end_frame) + '\n';
    span_text += '\n';
    transcript_text += result.sent_id + '\t' + result.transcript + '\n';
  }
  write_file(paths.output, span_text);
  if (!paths.transcript.empty()) write_file(paths.transcript, transcript_text);
  if (paths.frames.empty()) return;

  // Optional word-vector pooling over per-frame features.
  if (paths.vectors.empty())
    throw std::invalid_argument("--frames requires --vectors for the pooled output");
  PoolingMethod method = MeanPooling{};
  if (paths.pool == "last")
    method = LastPooling{};
  else if (paths.pool == "recurrent") {
    if (paths.weights.empty())
      throw std::invalid_argument("recurrent pooling requires --weights");
    method = RecurrentPooling{parse_lstm_weights(read_file(paths.weights))};
  }

  std::map<std::string, const Eigen::MatrixXd*> frames_by_id;
  const std::vector<FrameRecord> frame_records = parse_frame_file(read_file(paths.frames));
  for (const FrameRecord& record : frame_records)
    frames_by_id[record.sent_id] = &record.frames;

  std::vector<std::string> blocks(results.size());
  parallel_for(results.size(), jobs, [&](std::size_t i) {
    const Segmented& result = results[i];
    auto it = frames_by_id.find(result.sent_id);
    if (it == frames_by_id.end())
      throw std::invalid_argument("no frame features for sentence '" + result.sent_id + "'");
    const Eigen::MatrixXd pooled = pool_word_vectors(*it->second, result.spans, method);
    std::string block = "# sent_id = " + result.sent_id + '\n';
    for (std::size_t w = 0; w < result.spans.size(); ++w) {
      block += result.spans[w].word;
      for (Eigen::Index c = 0; c < pooled.cols(); ++c)
        block += '\t' + format_real(pooled(static_cast<Eigen::Index>(w), c));
      block += '\n';
    }
    blocks[i] = block + '\n';
  });
  std::string vector_text;
  for (const std::string& block : blocks) vector_text += block;
  write_file(paths.vectors, vector_text);
}

json counts_to_json(const EvalCounts& counts) {
  return json{{"ref_tokens", counts.ref_tokens},
              {"hyp_tokens", counts.hyp_tokens},
              {"matches", counts.matches},
              {"substitutions", counts.substitutions},
              {"insertions", counts.insertions},
              {"deletions", counts.deletions},
              {"correct_pos", counts.correct_pos},
              {"correct_heads", counts.correct_heads},
              {"correct_heads_and_labels", counts.correct_heads_and_labels},
              {"char_edits", counts.char_edits},
              {"ref_chars", counts.ref_chars}};
}

void cmd_eval(const std::string& hyp_path, const std::string& ref_path, bool standard,
              bool case_fold, bool verbose, bool json_output,
              const std::string& output, int jobs) {
  const Corpus hyp = parse_conllu(read_file(hyp_path));
  const Corpus ref = parse_conllu(read_file(ref_path));
  const EvalReport report = standard ? evaluate_standard(hyp, ref, case_fold)
                                     : evaluate_corpus(hyp, ref, case_fold);

  std::vector<std::pair<std::string, EvalCounts>> breakdown;
  if (verbose) {
    std::map<std::string, const Sentence*> hyp_by_id;
    for (const Sentence& sentence : hyp.sentences) hyp_by_id[sentence.sent_id] = &sentence;
    breakdown.resize(ref.sentences.size());
    parallel_for(ref.sentences.size(), jobs, [&](std::size_t i) {
      const Sentence& ref_sentence = ref.sentences[i];
      breakdown[i] = {ref_sentence.sent_id,
                      evaluate_pair(*hyp_by_id.at(ref_sentence.sent_id), ref_sentence,
                                    case_fold)};
    });
  }

  std::string text;
  if (json_output) {
    json object{{"wer", report.wer},
                {"cer", report.cer},
                {"pos", report.pos_acc},
                {"uas", report.uas},
                {"las", report.las},
                {"counts", counts_to_json(report.counts)}};
    if (verbose) {
      json sentences = json::array();
      for (const auto& [sent_id, counts] : breakdown) {
        json entry{{"sent_id", sent_id}, {"counts", counts_to_json(counts)}};
        if (counts.ref_tokens > 0) {
          const double denom = static_cast<double>(counts.ref_tokens);
          entry["wer"] = static_cast<double>(counts.substitutions + counts.insertions +
                                             counts.deletions) /
                         denom;
          entry["pos"] = static_cast<double>(counts.correct_pos) / denom;
          entry["uas"] = static_cast<double>(counts.correct_heads) / denom;
          entry["las"] = static_cast<double>(counts.correct_heads_and_labels) / denom;
        }
        sentences.push_back(std::move(entry));
      }
      object["sentences"] = std::move(sentences);
    }
    text = object.dump(2) + "\n";
  } else {
    text = "WER\tCER\tPOS\tUAS\tLAS\n";
    text += format_percent(report.wer) + '\t' + format_percent(report.cer) + '\t' +
            format_percent(report.pos_acc) + '\t' + format_percent(report.uas) + '\t' +
            format_percent(report.las) + '\n';
    const EvalCounts& counts = report.counts;
    text += "ref_tokens=" + std::to_string(counts.ref_tokens) +
            " hyp_tokens=" + std::to_string(counts.hyp_tokens) +
            " matches=" + std::to_string(counts.matches) +
            " substitutions=" + std::to_string(counts.substitutions) +
            " insertions=" + std::to_string(counts.insertions) +
            " deletions=" + std::to_string(counts.deletions) + '\n';
    if (verbose) {
      for (const auto& [sent_id, counts_i] : breakdown)
        text += sent_id + "\tuas=" + std::to_string(counts_i.correct_heads) + '/' +
                std::to_string(counts_i.ref_tokens) +
                "\tlas=" + std::to_string(counts_i.correct_heads_and_labels) + '/' +
                std::to_string(counts_i.ref_tokens) + '\n';
    }
  }
  write_file(output, text);
}

void cmd_perturb(const std::string& input, const std::string& output,
                 const PerturbSpec& spec) {
  const Corpus corpus = parse_conllu(read_file(input));
  write_file(output, write_conllu(perturb_corpus(corpus, spec)));
}

void cmd_stats(const std::string& input, bool json_output, const std::string& output) {
  const Corpus corpus = parse_conllu(read_file(input));
  const CorpusStats stats = corpus_stats(corpus);

  std::string text;
  if (json_output) {
    json object{{"sentences", stats.sentences},
                {"tokens", stats.tokens},
                {"upos", json::object()},
                {"deprel", json::object()},
                {"root_arity", json::object()},
                {"projective_sentences", stats.projective_sentences},
                {"projectivity_rate", stats.projectivity_rate()}};
    for (const auto& [tag, count] : stats.upos_counts) object["upos"][tag] = count;
    for (const auto& [rel, count] : stats.deprel_counts) object["deprel"][rel] = count;
    for (const auto& [arity, count] : stats.root_arity)
      object["root_arity"][std::to_string(arity)] = count;
    text = object.dump(2) + "\n";
  } else {
    text += "sentences\t" + std::to_string(stats.sentences) + '\n';
    text += "tokens\t" + std::to_string(stats.tokens) + '\n';
    text += "projectivity_rate\t" + format_percent(stats.projectivity_rate()) + '\n';
    text += "upos";
    for (const auto& [tag, count] : stats.upos_counts)
      text += ' ' + tag + '=' + std::to_string(count);
    text += "\ndeprel";
    for (const auto& [rel, count] : stats.deprel_counts)
      text += ' ' + rel + '=' + std::to_string(count);
    text += "\nroot_arity";
    for (const auto& [arity, count] : stats.root_arity)
      text += ' ' + std::to_string(arity) + '=' + std::to_string(count);
    text += '\n';
  }
  write_file(output, text);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Dependency parsing toolkit for speech-recognition output"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--jobs", global.jobs, "Worker threads for per-sentence work")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", global.seed, "Seed for randomized subcommands");
  app.add_option("--root-policy", global.root_policy, "Root arity: single or multi")
      ->check(CLI::IsMember({"single", "multi"}));
  app.add_flag("--json", global.json_output, "Machine-readable JSON output");

  std::string input = "-";
  std::string output = "-";
  std::string scores_path, tokens_path, relations_path;
  std::string hyp_path, ref_path;
  SegmentPaths seg;
  bool standard = false, case_fold = false, verbose = false;
  PerturbSpec spec;

  CLI::App* encode = app.add_subcommand("encode", "Treebank to head labels");
  encode->add_option("-i,--input", input, "Treebank to encode");
  encode->add_option("-o,--output", output, "Label file to write");
  encode->callback([&]() { cmd_encode(input, output); });

  CLI::App* decode = app.add_subcommand("decode", "Head labels to treebank");
  decode->add_option("-i,--input", input, "Label file to decode");
  decode->add_option("-o,--output", output, "Treebank to write");
  decode->callback([&]() { cmd_decode(input, output, global.policy()); });

  CLI::App* parse = app.add_subcommand("parse", "Arc scores to trees");
  parse->add_option("--scores", scores_path, "Arc-score file")->required();
  parse->add_option("--tokens", tokens_path, "Forms and POS tags")->required();
  parse->add_option("--relations", relations_path, "Relation vocabulary, one per line");
  parse->add_option("-o,--output", output, "Treebank to write");
  parse->callback([&]() {
    cmd_parse(scores_path, tokens_path, relations_path, output, global.policy(),
              global.jobs);
  });

  CLI::App* segment = app.add_subcommand("segment", "Frame posteriors to word spans");
  segment->add_option("--posteriors", seg.posteriors, "Frame posterior file")->required();
  segment->add_option("--vocab", seg.vocab, "Symbol vocabulary")->required();
  segment->add_option("--timestamps", seg.timestamps,
                      "Treebank with AlignBegin/AlignEnd for oracle spans");
  segment->add_option("--frame-rate", seg.frame_rate,
                      "Frames per second of the posteriors");
  segment->add_option("--transcript", seg.transcript, "Also write transcripts here");
  segment->add_option("--frames", seg.frames,
                      "Frame feature file; pools one vector per word");
  segment->add_option("--pool", seg.pool, "Pooling: mean, last or recurrent")
      ->check(CLI::IsMember({"mean", "last", "recurrent"}));
  segment->add_option("--weights", seg.weights, "Recurrent pooling weights");
  segment->add_option("--vectors", seg.vectors, "Pooled word vectors destination");
  segment->add_option("-o,--output", output, "Span file to write");
  segment->callback([&]() {
    seg.output = output;
    cmd_segment(seg, global.jobs);
  });

  CLI::App* eval = app.add_subcommand("eval", "Score a hypothesis against a reference");
  eval->add_option("--hyp", hyp_path, "Hypothesis treebank")->required();
  eval->add_option("--ref", ref_path, "Reference treebank")->required();
  eval->add_flag("--standard", standard, "Classic equal-length evaluation");
  eval->add_flag("--case-fold", case_fold, "Case-insensitive form comparison");
  eval->add_flag("--verbose", verbose, "Per-sentence breakdown");
  eval->add_option("-o,--output", output, "Report destination");
  eval->callback([&]() {
    cmd_eval(hyp_path, ref_path, standard, case_fold, verbose, global.json_output,
             output, global.jobs);
  });

  CLI::App* perturb = app.add_subcommand("perturb", "Corrupt a gold corpus");
  perturb->add_option("-i,--input", input, "Treebank to corrupt");
  perturb->add_option("-o,--output", output, "Corrupted treebank to write");
  perturb->add_option("--sub-rate", spec.sub_rate, "Per-token substitution probability");
  perturb->add_option("--ins-rate", spec.ins_rate, "Filler insertion probability");
  perturb->add_option("--del-rate", spec.del_rate, "Per-token deletion probability");
  perturb->add_option("--char-noise", spec.char_noise_rate,
                      "Per-character noise within substitutions");
  perturb->callback([&]() {
    spec.seed = global.seed;
    cmd_perturb(input, output, spec);
  });

  CLI::App* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("-i,--input", input, "Treebank to describe");
  stats->add_option("-o,--output", output, "Report destination");
  stats->callback([&]() { cmd_stats(input, global.json_output, output); });

  for (CLI::App* sub : {encode, decode, parse, segment, eval, perturb, stats})
    sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const IoError& e) {
    std::cerr << "speechdep: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "speechdep: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? argc - 1 : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace speechdep::cli
