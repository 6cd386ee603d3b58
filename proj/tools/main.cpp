// actionpiece: corpus synthesis, vocabulary construction, encoding/decoding,
// tokenizer statistics and ranking fusion, as reproducible seeded runs.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "actionpiece/construction.hpp"
#include "actionpiece/corpus.hpp"
#include "actionpiece/metrics.hpp"
#include "actionpiece/rng.hpp"
#include "actionpiece/segmentation.hpp"
#include "actionpiece/synth.hpp"
#include "actionpiece/vocabulary.hpp"

namespace {

using namespace actionpiece;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

unsigned default_threads() {
  if (const char* env = std::getenv("ACTIONPIECE_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) return static_cast<unsigned>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::string default_features_path(const std::string& vocab_path) {
  return vocab_path + ".features";
}

struct SynthArgs {
  SynthConfig config;
  std::string out;
  std::string features_out;
  std::string items_out;
};

struct BuildArgs {
  std::string corpus;
  std::string out;
  std::string features_in;
  std::string features_out;
  std::string progress_log;
  std::uint32_t target_size = 0;
  std::string engine = "efficient";
  bool check_oracle = false;
  bool no_context_aware = false;
  bool unweighted = false;
  bool strict_sizes = false;
  unsigned threads = default_threads();
};

struct EncodeArgs {
  std::string corpus;
  std::string vocab;
  std::string features;
  std::string out;
  std::string mode = "spr";
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  unsigned threads = default_threads();
};

struct DecodeArgs {
  std::string in;
  std::string vocab;
  std::string features;
  std::string items;
  std::string out;
  bool strict = false;
};

struct StatsArgs {
  std::string corpus;
  std::string vocab;
  std::string features;
  std::string out;
  std::string mode = "spr";
  std::uint64_t seed = 0;
  std::uint32_t epochs = 5;
  unsigned threads = default_threads();
};

struct FuseArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::uint32_t expect_q = 0;
};

FeatureRegistry registry_for(const std::string& features_path, const std::string& vocab_path) {
  const std::string path =
      features_path.empty() ? default_features_path(vocab_path) : features_path;
  return load_feature_registry(path);
}

void check_vocab_registry(const Vocabulary& vocab, const FeatureRegistry& registry) {
  if (vocab.initial_count() != registry.size())
    throw DataError("vocabulary declares " + std::to_string(vocab.initial_count()) +
                    " initial tokens but the feature registry lists " +
                    std::to_string(registry.size()));
}

int run_synth(const SynthArgs& args) {
  const SynthResult result = generate_corpus(args.config);
  std::ostringstream header;
  header << "actionpiece synth seed=" << args.config.seed
         << " sequences=" << args.config.num_sequences
         << " min_actions=" << args.config.min_actions
         << " max_actions=" << args.config.max_actions << " fields=" << args.config.fields
         << " codes_per_field=" << args.config.codes_per_field << " skew=" << args.config.skew
         << " item_pool=" << args.config.item_pool;
  save_corpus(result.corpus, args.out, {header.str()});
  const std::string features_path =
      args.features_out.empty() ? args.out + ".features" : args.features_out;
  save_feature_registry(result.features, features_path);
  if (args.config.item_pool > 0) {
    const std::string items_path =
        args.items_out.empty() ? args.out + ".items" : args.items_out;
    save_item_registry(result.items, items_path);
    std::cout << "synth: wrote " << result.corpus.size() << " sequences, "
              << result.features.size() << " features, " << result.items.size()
              << " items\n";
  } else {
    std::cout << "synth: wrote " << result.corpus.size() << " sequences, "
              << result.features.size() << " features\n";
  }
  return kExitOk;
}

int run_build(const BuildArgs& args) {
  FeatureRegistry registry;
  if (!args.features_in.empty()) registry = load_feature_registry(args.features_in);
  LoadOptions load_options;
  load_options.strict_uniform_sizes = args.strict_sizes;
  const Corpus corpus = load_corpus(args.corpus, registry, load_options);

  ConstructionConfig config;
  config.target_size = args.target_size;
  config.context_aware = !args.no_context_aware;
  config.weighted = !args.unweighted;
  config.threads = args.threads;
  config.collect_log = !args.progress_log.empty();
  config.engine = args.engine == "naive" ? Engine::Naive : Engine::Efficient;
  if (config.target_size < registry.size())
    throw ValidationError("--target-size " + std::to_string(config.target_size) +
                          " is below the initial vocabulary size " +
                          std::to_string(registry.size()));

  BuildResult result = build_vocab(corpus, registry, config);
  if (args.check_oracle) {
    ConstructionConfig other = config;
    other.engine = config.engine == Engine::Naive ? Engine::Efficient : Engine::Naive;
    const BuildResult check = build_vocab(corpus, registry, other);
    if (!(check.vocab == result.vocab))
      throw InternalError("engine divergence: rule ledgers differ between engines");
    for (std::size_t s = 0; s < result.corpus.size(); ++s)
      if (!(result.corpus[s].snapshot() == check.corpus[s].snapshot()))
        throw InternalError("engine divergence: final corpora differ at sequence " +
                            std::to_string(s));
    std::cout << "build: engines agree on " << result.vocab.rules().size() << " rules\n";
  }

  save_vocabulary(result.vocab, args.out);
  const std::string features_path =
      args.features_out.empty() ? default_features_path(args.out) : args.features_out;
  save_feature_registry(registry, features_path);
  if (!args.progress_log.empty()) {
    std::ostringstream log;
    log << "# actionpiece build corpus=" << args.corpus << " target_size=" << args.target_size
        << " engine=" << args.engine << " context_aware=" << (config.context_aware ? 1 : 0)
        << " weighted=" << (config.weighted ? 1 : 0) << "\n";
    log << "# iter,left,right,scaled_weight,heap_size\n";
    for (const IterationLog& entry : result.log) log << format_iteration_log(entry) << "\n";
    atomic_write_text(args.progress_log, log.str());
  }
  if (result.exhausted)
    std::cerr << "build: warning: ran out of co-occurring pairs at vocabulary size "
              << result.vocab.size() << " (target " << args.target_size << ")\n";
  std::cout << "build: vocabulary size " << result.vocab.size() << " ("
            << result.vocab.rules().size() << " rules) -> " << args.out << "\n";
  return kExitOk;
}

int run_encode(const EncodeArgs& args) {
  const Vocabulary vocab = load_vocabulary(args.vocab);
  const FeatureRegistry registry = registry_for(args.features, args.vocab);
  check_vocab_registry(vocab, registry);
  FeatureRegistry scratch = registry;
  const Corpus corpus = load_corpus(args.corpus, scratch);
  if (scratch.size() != registry.size())
    throw DataError("corpus contains features missing from the registry");

  const SegmentationMode mode = segmentation_mode_from_string(args.mode);
  const std::uint64_t epoch_seed = mix_seed(args.seed, args.epoch);
  const auto records = encode_batch(corpus, vocab, registry, mode, epoch_seed, args.threads);

  std::ostringstream header;
  header << "actionpiece encode corpus=" << args.corpus << " vocab=" << args.vocab
         << " mode=" << args.mode << " seed=" << args.seed << " epoch=" << args.epoch;
  save_encoded(records, args.out, {header.str()});
  std::cout << "encode: wrote " << records.size() << " records -> " << args.out << "\n";
  return kExitOk;
}

int run_decode(const DecodeArgs& args) {
  const Vocabulary vocab = load_vocabulary(args.vocab);
  const FeatureRegistry registry = registry_for(args.features, args.vocab);
  check_vocab_registry(vocab, registry);
  ItemRegistry items;
  const bool with_items = !args.items.empty();
  if (with_items) items = load_item_registry(args.items);

  const auto records = load_encoded(args.in);
  std::ostringstream out;
  out << "# actionpiece decode in=" << args.in << " vocab=" << args.vocab
      << (with_items ? " items=" + args.items : "") << "\n";
  std::size_t errors = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const EncodedRecord& record = records[i];
    try {
      if (with_items) {
        const DecodeOutcome outcome = decode_item(record.tokens, vocab, registry, items);
        out << record.index << '\t';
        for (std::size_t f = 0; f < outcome.features.size(); ++f) {
          if (f) out << ' ';
          out << outcome.features[f];
        }
        switch (outcome.status) {
          case DecodeOutcome::Status::Resolved:
            out << "\titem=" << outcome.item_id;
            break;
          case DecodeOutcome::Status::NotFound:
            out << "\titem=not-found";
            break;
          case DecodeOutcome::Status::InvalidGeneration:
            out << "\titem=invalid-generation";
            std::cerr << "decode: record " << i + 1
                      << ": invalid generation (repeated feature)\n";
            ++errors;
            break;
        }
        out << "\n";
      } else {
        const std::vector<FeatureId> features = expand(record.tokens, vocab, registry);
        out << record.index << '\t';
        for (std::size_t f = 0; f < features.size(); ++f) {
          if (f) out << ' ';
          out << features[f];
        }
        out << "\n";
      }
    } catch (const DataError& e) {
      std::cerr << "decode: record " << i + 1 << ": " << e.what() << "\n";
      ++errors;
    }
  }
  if (args.out.empty()) std::cout << out.str();
  else atomic_write_text(args.out, out.str());
  if (errors > 0) {
    std::cerr << "decode: " << errors << " record(s) failed\n";
    if (args.strict) return kExitData;
  }
  return kExitOk;
}

int run_stats(const StatsArgs& args) {
  const Vocabulary vocab = load_vocabulary(args.vocab);
  const FeatureRegistry registry = registry_for(args.features, args.vocab);
  check_vocab_registry(vocab, registry);
  FeatureRegistry scratch = registry;
  const Corpus corpus = load_corpus(args.corpus, scratch);
  if (scratch.size() != registry.size())
    throw DataError("corpus contains features missing from the registry");
  const SegmentationMode mode = segmentation_mode_from_string(args.mode);
  if (args.epochs == 0) throw ValidationError("--epochs must be positive");

  UtilizationAccumulator utilization(vocab);
  double first_nsl = 0.0;
  const std::uint32_t epochs = mode == SegmentationMode::Naive ? 1 : args.epochs;
  for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
    const auto records =
        encode_batch(corpus, vocab, registry, mode, mix_seed(args.seed, epoch), args.threads);
    std::vector<TokenSequence> tokens;
    tokens.reserve(records.size());
    for (const auto& r : records) tokens.push_back(r.tokens);
    if (epoch == 0) first_nsl = nsl(tokens, corpus);
    for (const auto& t : tokens) utilization.add(t);
  }
  const UtilizationReport report = utilization.report();

  std::ostringstream record;
  record << "corpus=" << args.corpus << " vocab_size=" << vocab.size() << " mode=" << args.mode
         << " nsl=" << first_nsl << " utilization=" << report.rate() << " q=" << epochs;
  std::cout << record.str() << "\n";
  if (!args.out.empty())
    atomic_write_text(args.out, "# actionpiece stats seed=" + std::to_string(args.seed) + "\n" +
                                    record.str() + "\n");
  return kExitOk;
}

int run_fuse(const FuseArgs& args) {
  if (args.expect_q != 0 && args.inputs.size() != args.expect_q)
    throw ValidationError("--q=" + std::to_string(args.expect_q) + " but " +
                          std::to_string(args.inputs.size()) + " list files were given");
  std::vector<RankedList> lists;
  lists.reserve(args.inputs.size());
  for (const auto& path : args.inputs) lists.push_back(load_ranked_list(path));
  const RankedList fused = fuse_rankings(lists);
  std::ostringstream header;
  header << "actionpiece fuse q=" << lists.size();
  save_ranked_list(fused, args.out, {header.str()});
  std::cout << "fuse: averaged " << lists.size() << " lists over " << fused.size()
            << " items -> " << args.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ActionPiece tokenizer: context-aware tokenization of action-set sequences"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth_cmd->add_option("--out", synth.out, "Corpus output path")->required();
  synth_cmd->add_option("--seed", synth.config.seed, "RNG seed");
  synth_cmd->add_option("--sequences", synth.config.num_sequences, "Number of sequences");
  synth_cmd->add_option("--min-actions", synth.config.min_actions, "Minimum actions per sequence");
  synth_cmd->add_option("--max-actions", synth.config.max_actions, "Maximum actions per sequence");
  synth_cmd->add_option("--fields", synth.config.fields, "Feature fields per action");
  synth_cmd->add_option("--codes", synth.config.codes_per_field, "Codes per field");
  synth_cmd->add_option("--skew", synth.config.skew, "Popularity skew exponent");
  synth_cmd->add_option("--items", synth.config.item_pool,
                        "Draw actions from a pool of this many items (0 = independent fields)");
  synth_cmd->add_option("--features-out", synth.features_out,
                        "Feature registry output (default <out>.features)");
  synth_cmd->add_option("--items-out", synth.items_out,
                        "Item registry output (default <out>.items)");

  BuildArgs build;
  CLI::App* build_cmd = app.add_subcommand("build", "Construct a vocabulary from a corpus");
  build_cmd->add_option("--corpus", build.corpus, "Corpus path")->required();
  build_cmd->add_option("--out", build.out, "Vocabulary output path")->required();
  build_cmd->add_option("--target-size,-q", build.target_size, "Target vocabulary size Q")
      ->required();
  build_cmd->add_option("--features", build.features_in,
                        "Preload this feature registry (otherwise derived from the corpus)");
  build_cmd->add_option("--features-out", build.features_out,
                        "Feature registry output (default <out>.features)");
  build_cmd->add_option("--engine", build.engine, "naive|efficient")
      ->check(CLI::IsMember({"naive", "efficient"}));
  build_cmd->add_flag("--check-oracle", build.check_oracle,
                      "Run both engines and fail on any divergence");
  build_cmd->add_flag("--no-context-aware", build.no_context_aware,
                      "Count and merge within actions only");
  build_cmd->add_flag("--unweighted", build.unweighted,
                      "Count every co-occurrence as 1 instead of size-dependent weights");
  build_cmd->add_flag("--strict-sizes", build.strict_sizes,
                      "Reject corpora with non-uniform action set sizes");
  build_cmd->add_option("--progress-log", build.progress_log,
                        "Write per-iteration progress (iter,left,right,weight,heap_size)");
  build_cmd->add_option("--threads", build.threads, "Worker threads for counting");

  EncodeArgs encode;
  CLI::App* encode_cmd = app.add_subcommand("encode", "Tokenize a corpus");
  encode_cmd->add_option("--corpus", encode.corpus, "Corpus path")->required();
  encode_cmd->add_option("--vocab", encode.vocab, "Vocabulary path")->required();
  encode_cmd->add_option("--features", encode.features,
                         "Feature registry (default <vocab>.features)");
  encode_cmd->add_option("--out", encode.out, "Encoded output path")->required();
  encode_cmd->add_option("--mode", encode.mode, "spr|naive")
      ->check(CLI::IsMember({"spr", "naive"}));
  encode_cmd->add_option("--seed", encode.seed, "Base seed for set permutations");
  encode_cmd->add_option("--epoch", encode.epoch, "Epoch number (varies SPR augmentation)");
  encode_cmd->add_option("--threads", encode.threads, "Worker threads");

  DecodeArgs decode;
  CLI::App* decode_cmd = app.add_subcommand("decode", "Expand encoded records back to features");
  decode_cmd->add_option("--in", decode.in, "Encoded file")->required();
  decode_cmd->add_option("--vocab", decode.vocab, "Vocabulary path")->required();
  decode_cmd->add_option("--features", decode.features,
                         "Feature registry (default <vocab>.features)");
  decode_cmd->add_option("--items", decode.items, "Item registry for item resolution");
  decode_cmd->add_option("--out", decode.out, "Output path (default stdout)");
  decode_cmd->add_flag("--strict", decode.strict, "Exit nonzero if any record fails");

  StatsArgs stats;
  CLI::App* stats_cmd = app.add_subcommand("stats", "Report NSL and token utilization");
  stats_cmd->add_option("--corpus", stats.corpus, "Corpus path")->required();
  stats_cmd->add_option("--vocab", stats.vocab, "Vocabulary path")->required();
  stats_cmd->add_option("--features", stats.features,
                        "Feature registry (default <vocab>.features)");
  stats_cmd->add_option("--mode", stats.mode, "spr|naive")
      ->check(CLI::IsMember({"spr", "naive"}));
  stats_cmd->add_option("--seed", stats.seed, "Base seed");
  stats_cmd->add_option("--epochs", stats.epochs,
                        "Epoch seeds to union for SPR utilization (default 5)");
  stats_cmd->add_option("--out", stats.out, "Also write the report here");
  stats_cmd->add_option("--threads", stats.threads, "Worker threads");

  FuseArgs fuse;
  CLI::App* fuse_cmd = app.add_subcommand("fuse", "Average item scores across ranking lists");
  fuse_cmd->add_option("lists", fuse.inputs, "Ranked list files (item<TAB>score per line)")
      ->required()
      ->expected(-1);
  fuse_cmd->add_option("--out", fuse.out, "Fused output path")->required();
  fuse_cmd->add_option("--q", fuse.expect_q,
                       "Assert this many input lists (typical ensemble size: 5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (build_cmd->parsed()) return run_build(build);
    if (encode_cmd->parsed()) return run_encode(encode);
    if (decode_cmd->parsed()) return run_decode(decode);
    if (stats_cmd->parsed()) return run_stats(stats);
    if (fuse_cmd->parsed()) return run_fuse(fuse);
    std::cerr << "no subcommand given\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
