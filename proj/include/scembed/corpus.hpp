#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scembed/common.hpp"

namespace scembed {

// Word/id table with reserved unknown-word and sentence-boundary entries.
//
// Content words take ids 0..num_content()-1 in descending count order, ties
// broken by byte order; the unknown word, begin-of-sentence, and
// end-of-sentence markers take the last three ids. Ids are dense in
// [0, size()).
class Vocabulary {
 public:
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";

  Vocabulary() = default;

  // Counted content words -> vocabulary. Words below min_count are absorbed
  // into <unk>, whose count becomes the absorbed total.
  static Vocabulary from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                std::int64_t min_count);

  // Words in the given id order; markers are recognized by string and
  // appended (count 0) when absent. Used when loading externally produced
  // model files where counts are unavailable.
  static Vocabulary from_word_list(std::span<const std::string> words);

  WordId id_or_unk(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string& word(WordId id) const;
  std::int64_t count(WordId id) const;

  WordId unk_id() const { return unk_id_; }
  WordId bos_id() const { return bos_id_; }
  WordId eos_id() const { return eos_id_; }
  bool is_marker(WordId id) const { return id == bos_id_ || id == eos_id_; }

  std::int32_t size() const { return static_cast<std::int32_t>(words_.size()); }
  std::int32_t num_content() const { return size() - 3; }
  std::int64_t total_tokens() const { return total_tokens_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
  WordId unk_id_ = -1;
  WordId bos_id_ = -1;
  WordId eos_id_ = -1;
  std::int64_t total_tokens_ = 0;

  WordId add_entry(std::string word, std::int64_t count);

  friend Vocabulary read_vocabulary(std::istream& in, std::string_view source_name);
};

// Splits on runs of ASCII whitespace, preserving case. Throws ParseError on
// invalid UTF-8.
std::vector<std::string> tokenize_line(std::string_view line);

// True when (lowercase a-z bytes) / (non-whitespace bytes) >= ratio. Lines
// with no non-whitespace bytes pass.
bool line_passes_lowercase_filter(std::string_view line, double ratio);

// Copies lines that pass the lowercase filter; returns the number kept.
std::size_t clean_corpus(std::istream& in, std::ostream& out, double ratio);

// One pass of counting over all lines; words seen fewer than min_count times
// map to <unk>. Throws ValidationError on an empty corpus or when a line
// contains a reserved marker string.
Vocabulary build_vocabulary(std::istream& corpus, std::int64_t min_count);

std::vector<WordId> apply_vocabulary(std::span<const std::string> tokens, const Vocabulary& vocab);

// Vocabulary file: "word<TAB>count" per line; <unk> first, then entries in
// id order (descending count, ties by byte order), markers last.
void write_vocabulary(const Vocabulary& vocab, std::ostream& out);
Vocabulary read_vocabulary(std::istream& in, std::string_view source_name);

// Tokenizes and id-maps every line. Empty lines become empty sentences.
std::vector<std::vector<WordId>> read_id_corpus(std::istream& in, const Vocabulary& vocab);

}  // namespace scembed
