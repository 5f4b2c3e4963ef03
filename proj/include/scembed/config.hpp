#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "scembed/common.hpp"
#include "scembed/scode.hpp"

namespace scembed {

// Flat key=value pipeline configuration with section-dotted keys. Command
// line flags override file values; all randomness derives from the one
// top-level seed unless scode.seed is set explicitly.
struct PipelineConfig {
  std::string lm_corpus;   // corpus.lm
  std::string emb_corpus;  // corpus.emb
  int lm_order = 4;        // lm.order
  std::int64_t vocab_min_count = 2;  // vocab.min_count
  int subs_k = 100;        // subs.K
  int sample_s = 100;      // sample.S
  TrainConfig scode;       // scode.d .z_constant .lambda0 .nu .epochs .seed
  bool scode_seed_set = false;
  std::optional<double> clean_lowercase_ratio;  // clean.lowercase_ratio
  std::uint64_t seed = 1;  // seed
  int threads = 1;         // threads

  // Throws ValidationError naming the offending dotted key.
  void validate() const;

  // Assigns one dotted key. Unknown keys and unparsable values throw
  // ValidationError naming the key.
  void set(std::string_view key, std::string_view value);

  // Canonical text form; used for hashing and manifests.
  std::string serialize() const;
  std::uint64_t config_hash() const { return fnv1a64(serialize()); }

  std::uint64_t sample_seed() const;
  std::uint64_t train_seed() const;
};

PipelineConfig load_config_file(const std::string& path);
void overlay_config_file(PipelineConfig& config, const std::string& path);

}  // namespace scembed
