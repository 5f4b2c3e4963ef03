// Command-line pipeline: corpus cleaning, vocabulary, n-gram language model,
// substitute distributions, pair sampling, sphere embedding training, and
// embedding queries. Subcommands exchange plain text artifacts and are
// individually resumable; run-all chains them with per-stage seeds derived
// from one top-level seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "scembed/config.hpp"
#include "scembed/corpus.hpp"
#include "scembed/discretize.hpp"
#include "scembed/eval.hpp"
#include "scembed/manifest.hpp"
#include "scembed/ngram.hpp"
#include "scembed/scode.hpp"
#include "scembed/substitutes.hpp"

namespace {

using namespace scembed;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path);
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::vector<WordId>> load_id_corpus(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in = open_input(path);
  return read_id_corpus(in, vocab);
}

void stage_manifest(const std::string& primary_output, std::string_view stage,
                    const PipelineConfig& config, std::uint64_t seed,
                    std::vector<std::string> inputs, std::vector<std::string> outputs) {
  write_manifest(primary_output + ".manifest", stage, config.config_hash(), seed, inputs, outputs);
}

// ---- stages ----------------------------------------------------------------

void stage_clean(const PipelineConfig& config, const std::string& in_path,
                 const std::string& out_path) {
  if (!config.clean_lowercase_ratio) {
    throw ValidationError("clean.lowercase_ratio is required for the clean stage");
  }
  std::ifstream in = open_input(in_path);
  std::ofstream out = open_output(out_path);
  const std::size_t kept = clean_corpus(in, out, *config.clean_lowercase_ratio);
  finish_output(out, out_path);
  std::cerr << "clean: kept " << kept << " lines\n";
  stage_manifest(out_path, "clean", config, config.seed, {in_path}, {out_path});
}

void stage_vocab(const PipelineConfig& config, const std::string& corpus_path,
                 const std::string& out_path) {
  std::ifstream in = open_input(corpus_path);
  const Vocabulary vocab = build_vocabulary(in, config.vocab_min_count);
  std::ofstream out = open_output(out_path);
  write_vocabulary(vocab, out);
  finish_output(out, out_path);
  std::cerr << "vocab: " << vocab.num_content() << " content words, <unk> count "
            << vocab.count(vocab.unk_id()) << "\n";
  stage_manifest(out_path, "vocab", config, config.seed, {corpus_path}, {out_path});
}

void stage_lm_train(const PipelineConfig& config, const std::string& corpus_path,
                    const std::string& vocab_path, const std::string& out_path) {
  std::ifstream vocab_in = open_input(vocab_path);
  const Vocabulary vocab = read_vocabulary(vocab_in, vocab_path);
  const auto corpus = load_id_corpus(corpus_path, vocab);
  const CountTable counts = count_ngrams(corpus, config.lm_order, vocab);
  KnDiagnostics diagnostics;
  const NgramModel model = estimate_kn(counts, vocab, &diagnostics);
  std::ofstream out = open_output(out_path);
  write_arpa(model, out);
  finish_output(out, out_path);
  std::cerr << "lm-train: order " << config.lm_order << ", discounts";
  for (double d : diagnostics.discounts) std::cerr << ' ' << format_general(d, 6);
  std::cerr << "\n";
  stage_manifest(out_path, "lm-train", config, config.seed, {corpus_path, vocab_path}, {out_path});
}

void stage_lm_ppl(const std::string& model_path, const std::string& corpus_path) {
  std::ifstream model_in = open_input(model_path);
  const NgramModel model = read_arpa(model_in, model_path);
  const auto corpus = load_id_corpus(corpus_path, model.vocab());
  std::cout << format_general(perplexity(model, corpus), 10) << "\n";
}

void stage_subs(const PipelineConfig& config, const std::string& model_path,
                const std::string& corpus_path, const std::string& out_path) {
  std::ifstream model_in = open_input(model_path);
  const NgramModel model = read_arpa(model_in, model_path);
  const auto corpus = load_id_corpus(corpus_path, model.vocab());
  std::ofstream out = open_output(out_path);
  substitutes_for_corpus(model, corpus, config.subs_k, out, config.threads);
  finish_output(out, out_path);
  stage_manifest(out_path, "subs", config, config.seed, {model_path, corpus_path}, {out_path});
}

void stage_sample(const PipelineConfig& config, const std::string& subs_path,
                  const std::string& out_path) {
  std::ifstream in = open_input(subs_path);
  std::ofstream out = open_output(out_path);
  const SamplePairsStats stats =
      sample_pairs_file(in, subs_path, out, config.sample_s, config.sample_seed());
  finish_output(out, out_path);
  std::cerr << "sample: " << stats.pairs << " pairs from " << stats.tokens << " tokens\n";
  stage_manifest(out_path, "sample", config, config.sample_seed(), {subs_path}, {out_path});
}

struct IndexedPairs {
  std::vector<std::string> x_words;
  std::vector<std::string> y_words;
  std::vector<CooccurrencePair> pairs;
};

// Two passes: count word types, order them by descending count then byte
// order, then map every pair onto dense ids.
IndexedPairs read_pairs_file(const std::string& path) {
  std::unordered_map<std::string, std::int64_t> x_counts, y_counts;
  {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto tab = line.find('\t');
      if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
        throw ParseError(path, line_no, "expected \"x_word<TAB>y_word\"");
      }
      x_counts[line.substr(0, tab)] += 1;
      y_counts[line.substr(tab + 1)] += 1;
    }
  }
  if (x_counts.empty()) throw ValidationError("pairs file " + path + " is empty");

  auto order_words = [](const std::unordered_map<std::string, std::int64_t>& counts) {
    std::vector<std::pair<std::string, std::int64_t>> rows(counts.begin(), counts.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::vector<std::string> words;
    words.reserve(rows.size());
    for (auto& [word, count] : rows) words.push_back(word);
    return words;
  };

  IndexedPairs data;
  data.x_words = order_words(x_counts);
  data.y_words = order_words(y_counts);
  std::unordered_map<std::string, WordId> x_index, y_index;
  for (std::size_t i = 0; i < data.x_words.size(); ++i) x_index[data.x_words[i]] = static_cast<WordId>(i);
  for (std::size_t i = 0; i < data.y_words.size(); ++i) y_index[data.y_words[i]] = static_cast<WordId>(i);

  std::ifstream in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    data.pairs.push_back({x_index.at(line.substr(0, tab)), y_index.at(line.substr(tab + 1))});
  }
  return data;
}

void stage_train(const PipelineConfig& config, const std::string& pairs_path,
                 const std::string& phi_path, const std::string& psi_path) {
  IndexedPairs data = read_pairs_file(pairs_path);
  TrainConfig train_config = config.scode;
  train_config.seed = config.train_seed();
  const TrainResult<double> result = train<double>(data.pairs, train_config);
  if (result.exact_ll) {
    std::cerr << "train: exact log-likelihood " << format_general(*result.exact_ll, 10) << "\n";
  }
  {
    std::ofstream out = open_output(phi_path);
    write_embeddings(out, data.x_words, result.embeddings.phi);
    finish_output(out, phi_path);
  }
  {
    std::ofstream out = open_output(psi_path);
    write_embeddings(out, data.y_words, result.embeddings.psi);
    finish_output(out, psi_path);
  }
  stage_manifest(phi_path, "train", config, train_config.seed, {pairs_path},
                 {phi_path, psi_path});
}

void stage_neighbors(const std::string& embeddings_path, const std::string& word, int k) {
  std::ifstream in = open_input(embeddings_path);
  const LoadedEmbeddings loaded = read_embeddings(in, embeddings_path);
  WordId query = -1;
  for (std::size_t i = 0; i < loaded.words.size(); ++i) {
    if (loaded.words[i] == word) {
      query = static_cast<WordId>(i);
      break;
    }
  }
  if (query < 0) throw ValidationError("word \"" + word + "\" not in " + embeddings_path);
  const NeighborList list = nearest_neighbors(loaded.vectors, query, k);
  for (const Neighbor& n : list.neighbors) {
    std::cout << loaded.words[static_cast<std::size_t>(n.word)] << '\t'
              << format_general(n.distance2, 6) << '\n';
  }
}

void stage_export(const PipelineConfig& config, const std::string& embeddings_path,
                  const std::string& out_path, double sigma) {
  std::ifstream in = open_input(embeddings_path);
  const LoadedEmbeddings loaded = read_embeddings(in, embeddings_path);
  std::ofstream out = open_output(out_path);
  export_scaled(out, loaded.words, loaded.vectors, sigma);
  finish_output(out, out_path);
  stage_manifest(out_path, "export", config, config.seed, {embeddings_path}, {out_path});
}

void run_all(const PipelineConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (config.lm_corpus.empty()) throw ValidationError("corpus.lm is required for run-all");
  if (config.emb_corpus.empty()) throw ValidationError("corpus.emb is required for run-all");
  fs::create_directories(out_dir);
  const auto path_in = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  std::string lm_corpus = config.lm_corpus;
  std::string emb_corpus = config.emb_corpus;
  if (config.clean_lowercase_ratio) {
    stage_clean(config, config.lm_corpus, path_in("lm_clean.txt"));
    lm_corpus = path_in("lm_clean.txt");
    if (config.emb_corpus == config.lm_corpus) {
      emb_corpus = lm_corpus;
    } else {
      stage_clean(config, config.emb_corpus, path_in("emb_clean.txt"));
      emb_corpus = path_in("emb_clean.txt");
    }
  }

  // Every stage reads its inputs back from disk, so run-all and a manual
  // stage-by-stage run produce identical artifacts.
  stage_vocab(config, lm_corpus, path_in("vocab.tsv"));
  stage_lm_train(config, lm_corpus, path_in("vocab.tsv"), path_in("model.arpa"));
  stage_subs(config, path_in("model.arpa"), emb_corpus, path_in("subs.tsv"));
  stage_sample(config, path_in("subs.tsv"), path_in("pairs.tsv"));
  stage_train(config, path_in("pairs.tsv"), path_in("phi.txt"), path_in("psi.txt"));

  std::vector<std::string> inputs{config.lm_corpus};
  if (config.emb_corpus != config.lm_corpus) inputs.push_back(config.emb_corpus);
  const std::vector<std::string> outputs{path_in("vocab.tsv"),  path_in("model.arpa"),
                                         path_in("subs.tsv"),   path_in("pairs.tsv"),
                                         path_in("phi.txt"),    path_in("psi.txt")};
  write_manifest(path_in("manifest.txt"), "run-all", config.config_hash(), config.seed, inputs,
                 outputs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"substitute-based spherical co-occurrence word embeddings"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file")->expected(1);
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "top-level seed (overrides config)");
  std::optional<int> threads_flag;
  app.add_option("--threads", threads_flag, "worker threads for parallel stages");

  std::string in_path, out_path, corpus_path, vocab_path, model_path, subs_path, pairs_path;
  std::string phi_path, psi_path, embeddings_path, word, out_dir;
  std::optional<double> ratio_flag, sigma_flag;
  std::optional<int> order_flag, k_flag, s_flag, min_count_flag, dim_flag, epochs_flag;

  CLI::App* cmd_clean = app.add_subcommand("clean", "drop lines failing the lowercase filter");
  cmd_clean->add_option("--in", in_path)->required();
  cmd_clean->add_option("--out", out_path)->required();
  cmd_clean->add_option("--ratio", ratio_flag, "minimum lowercase fraction");

  CLI::App* cmd_vocab = app.add_subcommand("vocab", "count words and build the vocabulary");
  cmd_vocab->add_option("--in", in_path)->required();
  cmd_vocab->add_option("--out", out_path)->required();
  cmd_vocab->add_option("--min-count", min_count_flag);

  CLI::App* cmd_lm_train = app.add_subcommand("lm-train", "estimate the n-gram model");
  cmd_lm_train->add_option("--corpus", corpus_path)->required();
  cmd_lm_train->add_option("--vocab", vocab_path)->required();
  cmd_lm_train->add_option("--out", out_path)->required();
  cmd_lm_train->add_option("--order", order_flag);

  CLI::App* cmd_lm_ppl = app.add_subcommand("lm-ppl", "corpus perplexity under a model");
  cmd_lm_ppl->add_option("--model", model_path)->required();
  cmd_lm_ppl->add_option("--corpus", corpus_path)->required();

  CLI::App* cmd_subs = app.add_subcommand("subs", "top-K substitute distributions per token");
  cmd_subs->add_option("--model", model_path)->required();
  cmd_subs->add_option("--corpus", corpus_path)->required();
  cmd_subs->add_option("--out", out_path)->required();
  cmd_subs->add_option("--k", k_flag);

  CLI::App* cmd_sample = app.add_subcommand("sample", "draw co-occurrence pairs");
  cmd_sample->add_option("--subs", subs_path)->required();
  cmd_sample->add_option("--out", out_path)->required();
  cmd_sample->add_option("--s", s_flag, "samples per token");

  CLI::App* cmd_train = app.add_subcommand("train", "train sphere embeddings from pairs");
  cmd_train->add_option("--pairs", pairs_path)->required();
  cmd_train->add_option("--out-phi", phi_path)->required();
  cmd_train->add_option("--out-psi", psi_path)->required();
  cmd_train->add_option("--dim", dim_flag);
  cmd_train->add_option("--epochs", epochs_flag);

  CLI::App* cmd_neighbors = app.add_subcommand("neighbors", "nearest embedding neighbors");
  cmd_neighbors->add_option("--embeddings", embeddings_path)->required();
  cmd_neighbors->add_option("--word", word)->required();
  cmd_neighbors->add_option("--k", k_flag);

  CLI::App* cmd_export = app.add_subcommand("export", "write scaled embeddings");
  cmd_export->add_option("--embeddings", embeddings_path)->required();
  cmd_export->add_option("--out", out_path)->required();
  cmd_export->add_option("--sigma", sigma_flag);

  CLI::App* cmd_run_all = app.add_subcommand("run-all", "full corpus-to-embeddings pipeline");
  cmd_run_all->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    PipelineConfig config;
    if (!config_path.empty()) overlay_config_file(config, config_path);
    if (seed_flag) config.seed = *seed_flag;
    if (threads_flag) config.threads = *threads_flag;
    if (ratio_flag) config.clean_lowercase_ratio = *ratio_flag;
    if (min_count_flag) config.vocab_min_count = *min_count_flag;
    if (order_flag) config.lm_order = *order_flag;
    if (k_flag && cmd_subs->parsed()) config.subs_k = *k_flag;
    if (s_flag) config.sample_s = *s_flag;
    if (dim_flag) config.scode.dim = *dim_flag;
    if (epochs_flag) config.scode.epochs = *epochs_flag;
    config.validate();

    if (cmd_clean->parsed()) {
      stage_clean(config, in_path, out_path);
    } else if (cmd_vocab->parsed()) {
      stage_vocab(config, in_path, out_path);
    } else if (cmd_lm_train->parsed()) {
      stage_lm_train(config, corpus_path, vocab_path, out_path);
    } else if (cmd_lm_ppl->parsed()) {
      stage_lm_ppl(model_path, corpus_path);
    } else if (cmd_subs->parsed()) {
      stage_subs(config, model_path, corpus_path, out_path);
    } else if (cmd_sample->parsed()) {
      stage_sample(config, subs_path, out_path);
    } else if (cmd_train->parsed()) {
      stage_train(config, pairs_path, phi_path, psi_path);
    } else if (cmd_neighbors->parsed()) {
      stage_neighbors(embeddings_path, word, k_flag.value_or(10));
    } else if (cmd_export->parsed()) {
      stage_export(config, embeddings_path, out_path, sigma_flag.value_or(0.1));
    } else if (cmd_run_all->parsed()) {
      run_all(config, out_dir);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
