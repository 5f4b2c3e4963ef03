#include "scembed/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "scembed/rng.hpp"

namespace scembed {

namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ValidationError("config key " + std::string(key) + " has invalid value \"" +
                          std::string(value) + "\"");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ValidationError("config key " + std::string(key) + " has invalid value \"" +
                          std::string(value) + "\"");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (lm_order < 1 || lm_order > kMaxOrder) {
    throw ValidationError("lm.order must be in [1, " + std::to_string(kMaxOrder) + "]");
  }
  if (vocab_min_count < 1) throw ValidationError("vocab.min_count must be >= 1");
  if (subs_k < 1) throw ValidationError("subs.K must be >= 1");
  if (sample_s < 1) throw ValidationError("sample.S must be >= 1");
  if (clean_lowercase_ratio &&
      (*clean_lowercase_ratio < 0.0 || *clean_lowercase_ratio > 1.0)) {
    throw ValidationError("clean.lowercase_ratio must be in [0, 1]");
  }
  if (threads < 1) throw ValidationError("threads must be >= 1");
  try {
    scode.validate();
  } catch (const ValidationError&) {
    throw;  // TrainConfig already names scode.* keys
  }
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "corpus.lm") {
    lm_corpus = value;
  } else if (key == "corpus.emb") {
    emb_corpus = value;
  } else if (key == "lm.order") {
    lm_order = parse_number<int>(key, value);
  } else if (key == "vocab.min_count") {
    vocab_min_count = parse_number<std::int64_t>(key, value);
  } else if (key == "subs.K") {
    subs_k = parse_number<int>(key, value);
  } else if (key == "sample.S") {
    sample_s = parse_number<int>(key, value);
  } else if (key == "scode.d") {
    scode.dim = parse_number<std::int64_t>(key, value);
  } else if (key == "scode.z_constant") {
    scode.z_constant = parse_double(key, value);
  } else if (key == "scode.lambda0") {
    scode.lambda0 = parse_double(key, value);
  } else if (key == "scode.nu") {
    scode.nu = parse_double(key, value);
  } else if (key == "scode.epochs") {
    scode.epochs = parse_number<int>(key, value);
  } else if (key == "scode.seed") {
    scode.seed = parse_number<std::uint64_t>(key, value);
    scode_seed_set = true;
  } else if (key == "clean.lowercase_ratio") {
    clean_lowercase_ratio = parse_double(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    threads = parse_number<int>(key, value);
  } else {
    throw ValidationError("unknown config key " + std::string(key));
  }
}

std::string PipelineConfig::serialize() const {
  std::ostringstream out;
  out << "corpus.lm=" << lm_corpus << '\n';
  out << "corpus.emb=" << emb_corpus << '\n';
  out << "lm.order=" << lm_order << '\n';
  out << "vocab.min_count=" << vocab_min_count << '\n';
  out << "subs.K=" << subs_k << '\n';
  out << "sample.S=" << sample_s << '\n';
  out << "scode.d=" << scode.dim << '\n';
  out << "scode.z_constant=" << format_general(scode.z_constant, 17) << '\n';
  out << "scode.lambda0=" << format_general(scode.lambda0, 17) << '\n';
  out << "scode.nu=" << format_general(scode.nu, 17) << '\n';
  out << "scode.epochs=" << scode.epochs << '\n';
  out << "scode.seed=" << train_seed() << '\n';
  if (clean_lowercase_ratio) {
    out << "clean.lowercase_ratio=" << format_general(*clean_lowercase_ratio, 17) << '\n';
  }
  out << "seed=" << seed << '\n';
  out << "threads=" << threads << '\n';
  return out.str();
}

std::uint64_t PipelineConfig::sample_seed() const { return derive_seed(seed, "sample-stage"); }

std::uint64_t PipelineConfig::train_seed() const {
  return scode_seed_set ? scode.seed : derive_seed(seed, "train-stage");
}

PipelineConfig load_config_file(const std::string& path) {
  PipelineConfig config;
  overlay_config_file(config, path);
  return config;
}

void overlay_config_file(PipelineConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(path, line_no, "expected key=value");
    }
    config.set(view.substr(0, eq), view.substr(eq + 1));
  }
}

}  // namespace scembed
