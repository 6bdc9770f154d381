// SPDX-License-Identifier: Apache-2.0

#include "ctcdec/cli/commands.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ctcdec/augment/noise.hpp"
#include "ctcdec/core/alphabet.hpp"
#include "ctcdec/core/lattice.hpp"
#include "ctcdec/decoder/decoder.hpp"
#include "ctcdec/error.hpp"
#include "ctcdec/eval/errors.hpp"
#include "ctcdec/lm/bilm.hpp"
#include "ctcdec/lm/corpus.hpp"
#include "ctcdec/lm/ngram.hpp"
#include "ctcdec/sim/synth.hpp"

namespace ctcdec::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::shared_ptr<spdlog::logger> Logger() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_logger_mt("ctcdec");
    l->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("CTCDEC_LOG"); env != nullptr && *env != '\0') {
      level = spdlog::level::from_str(env);
    }
    l->set_level(level);
    return l;
  }();
  return logger;
}

std::shared_ptr<const Alphabet> LoadAlphabet(const std::string& path) {
  return std::make_shared<const Alphabet>(path.empty() ? TextAlphabet() : Alphabet::Load(path));
}

std::vector<Transcript> CorpusOrBundled(const std::string& path, const Alphabet& alphabet) {
  if (path.empty()) return BundledSentences(alphabet);
  return LoadCorpus(path, alphabet);
}

NoiseMix ParseMix(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--noise-mix: cannot parse '" + item + "'");
    }
  }
  if (parts.size() != 3) throw UsageError("--noise-mix expects three values: ins,del,sub");
  return {parts[0], parts[1], parts[2]};
}

void RequireReadable(const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// Runs fn(i) for i in [0, n) on `jobs` threads. The exception of the lowest
// failing index is rethrown, so failures do not depend on scheduling.
void ParallelFor(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> ResolveLatticePaths(const std::string& manifest,
                                             std::vector<ManifestEntry>* entries_out) {
  auto entries = LoadManifest(manifest);
  const fs::path base = fs::path(manifest).parent_path();
  std::vector<std::string> paths;
  for (const auto& e : entries) {
    fs::path p(e.lattice_path);
    paths.push_back(p.is_absolute() ? p.string() : (base / p).string());
  }
  if (entries_out) *entries_out = std::move(entries);
  return paths;
}

std::vector<Transcript> EncodeLines(const std::vector<std::string>& lines, const Alphabet& alphabet) {
  std::vector<Transcript> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(Transcript{alphabet.Encode(line)});
  return out;
}

std::vector<Transcript> LoadReferences(const std::string& refs, const std::string& manifest,
                                       const Alphabet& alphabet) {
  if (refs.empty() == manifest.empty()) {
    throw UsageError("give exactly one of --refs or --manifest");
  }
  if (!refs.empty()) return EncodeLines(ReadLines(refs), alphabet);
  std::vector<ManifestEntry> entries;
  ResolveLatticePaths(manifest, &entries);
  std::vector<std::string> lines;
  for (const auto& e : entries) lines.push_back(e.reference);
  return EncodeLines(lines, alphabet);
}

// ---------------------------------------------------------------------------

struct FilterArgs {
  std::string input;
  std::string output;
};

void RunFilter(const FilterArgs& a, std::ostream& out) {
  std::ifstream in(a.input);
  if (!in) throw IoError("cannot open " + a.input);
  auto dst = OpenOutput(a.output);
  const auto stats = FilterCorpus(in, dst);
  out << "kept: " << stats.kept << "\ndropped: " << stats.dropped << '\n';
}

struct TrainArgs {
  std::string corpus;
  std::string alphabet;
  std::string output;
  int order = 5;
  std::string direction = "forward";
  std::size_t shift = 0;
  double epsilon = 0.0;
  std::string mix = "0.45,0.20,0.35";
  std::uint64_t seed = 0;
  bool shift_given = false;
  bool epsilon_given = false;
};

void RunTrain(const TrainArgs& a, std::ostream&) {
  const bool backward = a.direction == "backward";
  if (!backward && (a.shift_given || a.epsilon_given)) {
    throw UsageError("--future-shift and --epsilon apply to backward models only");
  }
  RequireReadable(a.corpus);
  auto alphabet = LoadAlphabet(a.alphabet);
  const auto corpus = CorpusOrBundled(a.corpus, *alphabet);
  auto dst = OpenOutput(a.output);

  std::optional<NGramLM> model;
  if (backward && a.epsilon_given) {
    NoiseSpec spec;
    spec.epsilon = a.epsilon;
    spec.mix = ParseMix(a.mix);
    spec.seed = a.seed;
    spec.Validate();
    const auto pairs = BuildBackwardCorpus(corpus, a.shift, spec, *alphabet);
    model.emplace(TrainBackwardNGram(pairs, alphabet, a.order, a.shift, a.epsilon));
  } else {
    model.emplace(TrainNGram(corpus, alphabet, a.order,
                             backward ? Direction::kBackward : Direction::kForward, a.shift));
  }
  model->Write(dst);
  if (!dst) throw IoError("cannot write " + a.output);
  Logger()->info("trained {} model of order {} on {} sentences", a.direction, a.order,
                 corpus.size());
}

struct AugmentArgs {
  std::string corpus;
  std::string alphabet;
  std::string output;
  std::size_t shift = 0;
  double epsilon = 0.05;
  std::string mix = "0.45,0.20,0.35";
  std::uint64_t seed = 0;
  bool exact_count = false;
};

void RunAugment(const AugmentArgs& a, std::ostream&) {
  RequireReadable(a.corpus);
  auto alphabet = LoadAlphabet(a.alphabet);
  NoiseSpec spec;
  spec.epsilon = a.epsilon;
  spec.mix = ParseMix(a.mix);
  spec.seed = a.seed;
  spec.exact_count = a.exact_count;
  spec.Validate();
  const auto corpus = CorpusOrBundled(a.corpus, *alphabet);
  auto dst = OpenOutput(a.output);
  WriteAugmentedCorpus(dst, BuildBackwardCorpus(corpus, a.shift, spec, *alphabet), *alphabet);
  if (!dst) throw IoError("cannot write " + a.output);
}

struct SimulateArgs {
  std::string corpus;
  std::string alphabet;
  std::string out_dir;
  std::size_t count = 0;
  std::string generator = "markov";
  std::size_t min_word_length = 4;
  std::size_t min_length = 20;
  std::size_t max_length = 80;
  std::uint64_t seed = 0;
  bool binary = false;
  std::size_t jobs = 1;
  LatticeSynthSpec synth;
};

void RunSimulate(const SimulateArgs& a, std::ostream& out) {
  RequireReadable(a.corpus);
  a.synth.Validate();
  auto alphabet = LoadAlphabet(a.alphabet);
  auto sentences = CorpusOrBundled(a.corpus, *alphabet);
  if (a.count > 0 && a.generator == "lexicon") {
    LexiconSampler lexicon(sentences, *alphabet, a.min_word_length);
    sentences = lexicon.SampleCorpus(a.count, a.seed, a.min_length, a.max_length);
  } else if (a.count > 0) {
    CharMarkovChain chain(sentences, *alphabet);
    sentences = chain.SampleCorpus(a.count, a.seed, a.min_length, a.max_length);
  }
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
  auto manifest = OpenOutput((fs::path(a.out_dir) / "manifest.tsv").string());

  LatticeSynthSpec spec = a.synth;
  // Lattice noise draws from a stream separate from sentence sampling.
  spec.seed = MixSeed(a.seed, 1);
  std::vector<ManifestEntry> entries(sentences.size());
  ParallelFor(sentences.size(), a.jobs, [&](std::size_t i) {
    Rng rng(MixSeed(spec.seed, i));
    const auto lattice = SynthesizeLattice(sentences[i], spec, *alphabet, rng);
    char name[32];
    std::snprintf(name, sizeof(name), "utt%05zu.lat", i);
    SaveLattice((fs::path(a.out_dir) / name).string(), lattice, a.binary);
    entries[i] = {name, alphabet->Decode(sentences[i].labels)};
  });
  WriteManifest(manifest, entries);
  if (!manifest) throw IoError("cannot write manifest in " + a.out_dir);
  out << "lattices: " << entries.size() << '\n';
}

struct DecodeArgs {
  std::string mode = "uni";
  std::string manifest;
  std::vector<std::string> lattices;
  std::string alphabet;
  std::string forward_model;
  std::string backward_model;
  std::string output;
  std::string hyps;
  std::size_t nbest = 0;
  std::size_t jobs = 1;
  DecodeParams params;
  bool shift_given = false;
};

void RunDecode(const DecodeArgs& a, std::ostream& out) {
  if (a.manifest.empty() == a.lattices.empty()) {
    throw UsageError("give exactly one of --manifest or --lattice");
  }
  if (a.mode != "greedy" && a.forward_model.empty()) {
    throw UsageError("--mode " + a.mode + " needs --forward-model");
  }
  if (a.mode == "bi" && a.backward_model.empty()) {
    throw UsageError("--mode bi needs --backward-model");
  }
  RequireReadable(a.manifest);
  RequireReadable(a.forward_model);
  RequireReadable(a.backward_model);

  auto alphabet = LoadAlphabet(a.alphabet);
  const auto paths = a.manifest.empty() ? a.lattices : ResolveLatticePaths(a.manifest, nullptr);

  std::shared_ptr<const NGramLM> forward;
  std::shared_ptr<const NGramLM> backward;
  if (!a.forward_model.empty()) {
    forward = std::make_shared<const NGramLM>(NGramLM::Load(a.forward_model, alphabet));
  }
  DecodeParams params = a.params;
  if (a.mode == "bi") {
    backward = std::make_shared<const NGramLM>(NGramLM::Load(a.backward_model, alphabet));
    if (!a.shift_given) {
      params.future_shift = backward->shift();
    } else if (params.future_shift != backward->shift()) {
      throw UsageError("--future-shift " + std::to_string(params.future_shift) +
                       " does not match the backward model's shift " +
                       std::to_string(backward->shift()));
    }
  }
  params.Validate();
  std::optional<BiLMCombiner> bilm;
  if (backward) bilm.emplace(forward, backward, params.lambda);

  std::ofstream nbest_file;
  std::ofstream hyps_file;
  if (!a.output.empty()) nbest_file = OpenOutput(a.output);
  if (!a.hyps.empty()) hyps_file = OpenOutput(a.hyps);

  std::vector<std::string> blocks(paths.size());
  std::vector<std::string> best(paths.size());
  ParallelFor(paths.size(), a.jobs, [&](std::size_t i) {
    const auto lattice = LoadLattice(paths[i]);
    NBestList list;
    if (a.mode == "greedy") {
      list = DecodeGreedy(lattice, *alphabet);
    } else if (a.mode == "uni") {
      list = DecodeUnidirectional(lattice, *forward, params);
    } else {
      list = DecodeBidirectional(lattice, *bilm, params);
    }
    if (a.nbest > 0 && list.entries.size() > a.nbest) list.entries.resize(a.nbest);
    std::ostringstream block;
    block << "#utt " << i << '\t' << paths[i] << '\n';
    WriteNBest(block, list, *alphabet);
    blocks[i] = block.str();
    if (!list.entries.empty()) best[i] = alphabet->Decode(list.entries.front().labels.labels);
  });

  std::ostream& nbest_out = a.output.empty() ? out : nbest_file;
  for (const auto& b : blocks) nbest_out << b;
  if (!a.hyps.empty()) {
    for (const auto& h : best) hyps_file << h << '\n';
    if (!hyps_file) throw IoError("cannot write " + a.hyps);
  }
  if (!nbest_out) throw IoError("cannot write n-best output");
  Logger()->info("decoded {} utterances in {} mode", paths.size(), a.mode);
}

struct PerplexityArgs {
  std::string corpus;
  std::string alphabet;
  std::string forward_model;
  std::string backward_model;
  double lambda = 0.5;
  double epsilon = 0.0;
  std::string mix = "0.45,0.20,0.35";
  std::uint64_t seed = 0;
};

void RunPerplexity(const PerplexityArgs& a, std::ostream& out) {
  if (a.forward_model.empty() && a.backward_model.empty()) {
    throw UsageError("give --forward-model, --backward-model, or both");
  }
  RequireReadable(a.corpus);
  RequireReadable(a.forward_model);
  RequireReadable(a.backward_model);
  auto alphabet = LoadAlphabet(a.alphabet);
  const auto corpus = CorpusOrBundled(a.corpus, *alphabet);
  std::shared_ptr<const NGramLM> forward;
  std::shared_ptr<const NGramLM> backward;
  if (!a.forward_model.empty()) {
    forward = std::make_shared<const NGramLM>(NGramLM::Load(a.forward_model, alphabet));
  }
  if (!a.backward_model.empty()) {
    backward = std::make_shared<const NGramLM>(NGramLM::Load(a.backward_model, alphabet));
  }
  double ppl = 0.0;
  if (forward && backward) {
    BiLMCombiner bilm(forward, backward, a.lambda);
    FutureContext ctx = FutureContext::Clean();
    if (a.epsilon > 0.0) {
      NoiseSpec spec;
      spec.epsilon = a.epsilon;
      spec.mix = ParseMix(a.mix);
      spec.seed = a.seed;
      spec.Validate();
      ctx = FutureContext::Noisy(spec);
    }
    ppl = Perplexity(bilm, corpus, ctx);
  } else {
    ppl = Perplexity(forward ? *forward : *backward, corpus);
  }
  out << std::setprecision(10) << "perplexity: " << ppl << '\n';
}

struct EvaluateArgs {
  std::string hyps;
  std::string refs;
  std::string manifest;
  std::string alphabet;
  std::string output;
  std::string tsv;
  std::size_t bins = ErrorReport::kDefaultBins;
};

void RunEvaluate(const EvaluateArgs& a, std::ostream& out) {
  RequireReadable(a.refs);
  RequireReadable(a.manifest);
  auto alphabet = LoadAlphabet(a.alphabet);
  const auto refs = LoadReferences(a.refs, a.manifest, *alphabet);
  const auto hyps = EncodeLines(ReadLines(a.hyps), *alphabet);
  const auto report = Evaluate(hyps, refs, a.bins);
  if (a.output.empty()) {
    WriteReport(out, report);
  } else {
    auto dst = OpenOutput(a.output);
    WriteReport(dst, report);
  }
  if (!a.tsv.empty()) {
    auto dst = OpenOutput(a.tsv);
    WriteReportTsv(dst, report);
  }
}

struct CompareArgs {
  std::string uni;
  std::string bi;
  std::string refs;
  std::string manifest;
  std::string alphabet;
  std::string output;
  std::size_t bins = ErrorReport::kDefaultBins;
};

void RunCompare(const CompareArgs& a, std::ostream& out) {
  RequireReadable(a.refs);
  RequireReadable(a.manifest);
  auto alphabet = LoadAlphabet(a.alphabet);
  const auto refs = LoadReferences(a.refs, a.manifest, *alphabet);
  const auto uni = Evaluate(EncodeLines(ReadLines(a.uni), *alphabet), refs, a.bins);
  const auto bi = Evaluate(EncodeLines(ReadLines(a.bi), *alphabet), refs, a.bins);
  if (a.output.empty()) {
    WriteComparison(out, uni, bi);
  } else {
    auto dst = OpenOutput(a.output);
    WriteComparison(dst, uni, bi);
  }
}

void AddNoiseOptions(CLI::App* cmd, double* epsilon, std::string* mix, std::uint64_t* seed) {
  cmd->add_option("--epsilon", *epsilon, "Per-token corruption rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--noise-mix", *mix, "Insertion,deletion,substitution shares");
  cmd->add_option("--seed", *seed, "Random seed");
}

void AddDecodeParams(CLI::App* cmd, DecodeParams* p) {
  cmd->add_option("--beam-width", p->beam_width, "Hypotheses kept per frame")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lm-weight", p->lm_weight, "Weight of the LM log-probability");
  cmd->add_option("--length-reward", p->length_reward, "Reward per emitted label");
  cmd->add_option("--beam-threshold", p->beam_threshold,
                  "Drop hypotheses this far below the best (inf disables)");
  cmd->add_option("--lambda", p->lambda, "Forward weight of the bidirectional fusion")
      ->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CTC prefix beam search with forward and bidirectional character LMs", "ctcdec"};
  app.require_subcommand(1);
  std::function<void()> action;

  FilterArgs filter;
  auto* c_filter = app.add_subcommand("filter", "Drop short or mostly non-alphabetic lines");
  c_filter->add_option("input", filter.input, "Corpus to filter")->required();
  c_filter->add_option("output", filter.output, "Filtered corpus")->required();
  c_filter->callback([&] { action = [&] { RunFilter(filter, out); }; });

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-lm", "Train a forward or backward n-gram model");
  c_train->add_option("--corpus", train.corpus, "Training corpus (default: bundled text)");
  c_train->add_option("--alphabet", train.alphabet, "Alphabet file (default: a-z, space, ')");
  c_train->add_option("--order", train.order, "N-gram order")->check(CLI::Range(1, NGramLM::kMaxOrder));
  c_train->add_option("--direction", train.direction, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}));
  auto* train_shift = c_train->add_option("--future-shift", train.shift, "Backward shift tau");
  auto* train_eps = c_train->add_option("--epsilon", train.epsilon,
                                        "Train on noise-augmented futures with this rate");
  train_eps->check(CLI::Range(0.0, 1.0));
  c_train->add_option("--noise-mix", train.mix, "Insertion,deletion,substitution shares");
  c_train->add_option("--seed", train.seed, "Noise seed");
  c_train->add_option("-o,--output", train.output, "Model file")->required();
  c_train->callback([&] {
    train.shift_given = train_shift->count() > 0;
    train.epsilon_given = train_eps->count() > 0;
    action = [&] { RunTrain(train, out); };
  });

  AugmentArgs augment;
  auto* c_aug = app.add_subcommand("augment", "Build noisy-future training records");
  c_aug->add_option("--corpus", augment.corpus, "Clean corpus (default: bundled text)");
  c_aug->add_option("--alphabet", augment.alphabet, "Alphabet file");
  c_aug->add_option("--future-shift", augment.shift, "Backward shift tau");
  AddNoiseOptions(c_aug, &augment.epsilon, &augment.mix, &augment.seed);
  c_aug->add_flag("--exact-count", augment.exact_count, "Corrupt round(epsilon*n) positions");
  c_aug->add_option("-o,--output", augment.output, "Augmented corpus")->required();
  c_aug->callback([&] { action = [&] { RunAugment(augment, out); }; });

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Synthesize posterior lattices and a manifest");
  c_sim->add_option("--corpus", sim.corpus, "Reference sentences (default: bundled text)");
  c_sim->add_option("--alphabet", sim.alphabet, "Alphabet file");
  c_sim->add_option("--count", sim.count,
                    "Sample this many sentences from a model of the corpus");
  c_sim->add_option("--generator", sim.generator, "markov (character chain) or lexicon (random words)")
      ->check(CLI::IsMember({"markov", "lexicon"}));
  c_sim->add_option("--min-word-length", sim.min_word_length, "Shortest lexicon word");
  c_sim->add_option("--min-length", sim.min_length, "Shortest sampled sentence");
  c_sim->add_option("--max-length", sim.max_length, "Longest sampled sentence");
  c_sim->add_option("--frames-per-label", sim.synth.frames_per_label)->check(CLI::PositiveNumber);
  c_sim->add_option("--blank-affinity", sim.synth.blank_affinity);
  c_sim->add_option("--confidence", sim.synth.emission_confidence);
  c_sim->add_option("--corruption-rate", sim.synth.corruption_rate);
  c_sim->add_option("--front-bias", sim.synth.front_bias);
  c_sim->add_option("--true-share", sim.synth.corrupted_true_share,
                    "Emission mass left on the true label of a corrupted frame");
  c_sim->add_option("--jitter", sim.synth.jitter);
  c_sim->add_option("--seed", sim.seed, "Random seed");
  c_sim->add_flag("--binary", sim.binary, "Write binary lattices");
  c_sim->add_option("--jobs", sim.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_sim->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  c_sim->callback([&] { action = [&] { RunSimulate(sim, out); }; });

  DecodeArgs dec;
  auto* c_dec = app.add_subcommand("decode", "Decode lattices");
  c_dec->add_option("--mode", dec.mode, "greedy, uni or bi")
      ->check(CLI::IsMember({"greedy", "uni", "bi"}));
  c_dec->add_option("--manifest", dec.manifest, "Lattice manifest");
  c_dec->add_option("--lattice", dec.lattices, "Lattice file (repeatable)");
  c_dec->add_option("--alphabet", dec.alphabet, "Alphabet file");
  c_dec->add_option("--forward-model", dec.forward_model, "Forward NGLM1 model");
  c_dec->add_option("--backward-model", dec.backward_model, "Backward NGLM1 model");
  AddDecodeParams(c_dec, &dec.params);
  auto* dec_shift = c_dec->add_option("--future-shift", dec.params.future_shift,
                                      "Backward shift tau (default: the model's)");
  c_dec->add_option("--nbest", dec.nbest, "Hypotheses written per utterance (0: all)");
  c_dec->add_option("--jobs", dec.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_dec->add_option("-o,--output", dec.output, "N-best output (default: stdout)");
  c_dec->add_option("--hyps", dec.hyps, "One-best transcripts, one line per utterance");
  c_dec->callback([&] {
    dec.shift_given = dec_shift->count() > 0;
    action = [&] { RunDecode(dec, out); };
  });

  PerplexityArgs ppl;
  auto* c_ppl = app.add_subcommand("perplexity", "Character-level perplexity of a model");
  c_ppl->add_option("--corpus", ppl.corpus, "Evaluation corpus (default: bundled text)");
  c_ppl->add_option("--alphabet", ppl.alphabet, "Alphabet file");
  c_ppl->add_option("--forward-model", ppl.forward_model, "Forward NGLM1 model");
  c_ppl->add_option("--backward-model", ppl.backward_model, "Backward NGLM1 model");
  c_ppl->add_option("--lambda", ppl.lambda, "Forward weight when both models are given")
      ->check(CLI::Range(0.0, 1.0));
  AddNoiseOptions(c_ppl, &ppl.epsilon, &ppl.mix, &ppl.seed);
  c_ppl->callback([&] { action = [&] { RunPerplexity(ppl, out); }; });

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Character error rate report");
  c_eval->add_option("--hyps", ev.hyps, "Hypotheses, one per line")->required();
  c_eval->add_option("--refs", ev.refs, "References, one per line");
  c_eval->add_option("--manifest", ev.manifest, "Take references from a manifest");
  c_eval->add_option("--alphabet", ev.alphabet, "Alphabet file");
  c_eval->add_option("--bins", ev.bins, "Relative-position bins")->check(CLI::PositiveNumber);
  c_eval->add_option("-o,--output", ev.output, "Report (default: stdout)");
  c_eval->add_option("--tsv", ev.tsv, "Tab-separated report");
  c_eval->callback([&] { action = [&] { RunEvaluate(ev, out); }; });

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Compare unidirectional and bidirectional output");
  c_cmp->add_option("--uni", cmp.uni, "Unidirectional hypotheses")->required();
  c_cmp->add_option("--bi", cmp.bi, "Bidirectional hypotheses")->required();
  c_cmp->add_option("--refs", cmp.refs, "References, one per line");
  c_cmp->add_option("--manifest", cmp.manifest, "Take references from a manifest");
  c_cmp->add_option("--alphabet", cmp.alphabet, "Alphabet file");
  c_cmp->add_option("--bins", cmp.bins, "Relative-position bins")->check(CLI::PositiveNumber);
  c_cmp->add_option("-o,--output", cmp.output, "Report (default: stdout)");
  c_cmp->callback([&] { action = [&] { RunCompare(cmp, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "ctcdec: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "ctcdec: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "ctcdec: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ctcdec::cli
