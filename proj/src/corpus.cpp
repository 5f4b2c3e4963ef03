#include "scembed/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace scembed {

namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

// RFC 3629 well-formedness check.
void require_valid_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char b = s[i];
    std::size_t need = 0;
    unsigned char lo = 0x80, hi = 0xBF;
    if (b < 0x80) {
      ++i;
      continue;
    } else if (b >= 0xC2 && b <= 0xDF) {
      need = 1;
    } else if (b == 0xE0) {
      need = 2;
      lo = 0xA0;
    } else if (b >= 0xE1 && b <= 0xEC) {
      need = 2;
    } else if (b == 0xED) {
      need = 2;
      hi = 0x9F;
    } else if (b >= 0xEE && b <= 0xEF) {
      need = 2;
    } else if (b == 0xF0) {
      need = 3;
      lo = 0x90;
    } else if (b >= 0xF1 && b <= 0xF3) {
      need = 3;
    } else if (b == 0xF4) {
      need = 3;
      hi = 0x8F;
    } else {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "0x%02X", b);
      throw ParseError(std::string("invalid UTF-8 byte ") + buf + " at offset " + std::to_string(i));
    }
    if (i + need >= n) {
      throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(i));
    }
    for (std::size_t k = 1; k <= need; ++k) {
      const unsigned char c = s[i + k];
      const unsigned char klo = (k == 1) ? lo : 0x80;
      const unsigned char khi = (k == 1) ? hi : 0xBF;
      if (c < klo || c > khi) {
        throw ParseError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
      }
    }
    i += need + 1;
  }
}

bool is_reserved(std::string_view word) {
  return word == Vocabulary::kUnk || word == Vocabulary::kBos || word == Vocabulary::kEos;
}

}  // namespace

WordId Vocabulary::add_entry(std::string word, std::int64_t count) {
  const WordId id = static_cast<WordId>(words_.size());
  index_.emplace(word, id);
  words_.push_back(std::move(word));
  counts_.push_back(count);
  return id;
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                   std::int64_t min_count) {
  if (min_count < 1) throw ValidationError("min_count must be >= 1");
  std::vector<std::pair<std::string_view, std::int64_t>> retained;
  std::int64_t unk_count = 0;
  std::int64_t total = 0;
  for (const auto& [word, count] : counts) {
    if (is_reserved(word)) {
      throw ValidationError("reserved marker \"" + std::string(word) + "\" occurs in the corpus");
    }
    total += count;
    if (count >= min_count) {
      retained.emplace_back(word, count);
    } else {
      unk_count += count;
    }
  }
  if (total == 0) throw ValidationError("empty corpus: no tokens counted");
  std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  for (const auto& [word, count] : retained) {
    vocab.add_entry(std::string(word), count);
  }
  vocab.unk_id_ = vocab.add_entry(std::string(kUnk), unk_count);
  vocab.bos_id_ = vocab.add_entry(std::string(kBos), 0);
  vocab.eos_id_ = vocab.add_entry(std::string(kEos), 0);
  vocab.total_tokens_ = total;
  return vocab;
}

Vocabulary Vocabulary::from_word_list(std::span<const std::string> words) {
  Vocabulary vocab;
  for (const std::string& word : words) {
    if (vocab.index_.count(word)) {
      throw ValidationError("duplicate word \"" + word + "\" in word list");
    }
    const WordId id = vocab.add_entry(word, 0);
    if (word == kUnk) vocab.unk_id_ = id;
    if (word == kBos) vocab.bos_id_ = id;
    if (word == kEos) vocab.eos_id_ = id;
  }
  if (vocab.unk_id_ < 0) vocab.unk_id_ = vocab.add_entry(std::string(kUnk), 0);
  if (vocab.bos_id_ < 0) vocab.bos_id_ = vocab.add_entry(std::string(kBos), 0);
  if (vocab.eos_id_ < 0) vocab.eos_id_ = vocab.add_entry(std::string(kEos), 0);
  return vocab;
}

WordId Vocabulary::id_or_unk(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? unk_id_ : it->second;
}

bool Vocabulary::contains(std::string_view word) const {
  return index_.count(std::string(word)) > 0;
}

const std::string& Vocabulary::word(WordId id) const {
  if (id < 0 || id >= size()) throw ValidationError("word id " + std::to_string(id) + " out of range");
  return words_[static_cast<std::size_t>(id)];
}

std::int64_t Vocabulary::count(WordId id) const {
  if (id < 0 || id >= size()) throw ValidationError("word id " + std::to_string(id) + " out of range");
  return counts_[static_cast<std::size_t>(id)];
}

std::vector<std::string> tokenize_line(std::string_view line) {
  require_valid_utf8(line);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && is_ascii_space(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < n && !is_ascii_space(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

bool line_passes_lowercase_filter(std::string_view line, double ratio) {
  if (ratio < 0.0 || ratio > 1.0) throw ValidationError("lowercase ratio must be in [0, 1]");
  std::int64_t lowercase = 0;
  std::int64_t non_space = 0;
  for (unsigned char c : line) {
    if (is_ascii_space(c)) continue;
    ++non_space;
    if (c >= 'a' && c <= 'z') ++lowercase;
  }
  if (non_space == 0) return true;
  return static_cast<double>(lowercase) >= ratio * static_cast<double>(non_space);
}

std::size_t clean_corpus(std::istream& in, std::ostream& out, double ratio) {
  std::string line;
  std::size_t kept = 0;
  while (std::getline(in, line)) {
    if (line_passes_lowercase_filter(line, ratio)) {
      out << line << '\n';
      ++kept;
    }
  }
  return kept;
}

Vocabulary build_vocabulary(std::istream& corpus, std::int64_t min_count) {
  std::unordered_map<std::string, std::int64_t> counts;
  std::string line;
  while (std::getline(corpus, line)) {
    for (std::string& token : tokenize_line(line)) {
      counts[std::move(token)] += 1;
    }
  }
  return Vocabulary::from_counts(counts, min_count);
}

std::vector<WordId> apply_vocabulary(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const std::string& token : tokens) {
    // Boundary markers are never content; a literal marker string maps to
    // the unknown word instead of injecting a boundary id.
    if (token == Vocabulary::kBos || token == Vocabulary::kEos) {
      ids.push_back(vocab.unk_id());
      continue;
    }
    ids.push_back(vocab.id_or_unk(token));
  }
  return ids;
}

void write_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  out << Vocabulary::kUnk << '\t' << vocab.count(vocab.unk_id()) << '\n';
  for (WordId id = 0; id < vocab.size(); ++id) {
    if (id == vocab.unk_id()) continue;
    out << vocab.word(id) << '\t' << vocab.count(id) << '\n';
  }
}

Vocabulary read_vocabulary(std::istream& in, std::string_view source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::int64_t unk_count = -1;
  std::vector<std::pair<std::string, std::int64_t>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(source_name, line_no, "expected \"word<TAB>count\"");
    }
    std::string word = line.substr(0, tab);
    std::int64_t count = 0;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(source_name, line_no, "bad count field");
    }
    if (line_no == 1) {
      if (word != Vocabulary::kUnk) {
        throw ParseError(source_name, line_no, "first entry must be <unk>");
      }
      unk_count = count;
    } else {
      rows.emplace_back(std::move(word), count);
    }
  }
  if (unk_count < 0) throw ParseError(source_name, line_no, "missing <unk> entry");

  Vocabulary vocab;
  for (auto& [word, count] : rows) {
    if (word == Vocabulary::kBos || word == Vocabulary::kEos) continue;
    if (word == Vocabulary::kUnk) throw ParseError(source_name, 0, "duplicate <unk> entry");
    vocab.add_entry(std::move(word), count);
    vocab.total_tokens_ += count;
  }
  vocab.unk_id_ = vocab.add_entry(std::string(Vocabulary::kUnk), unk_count);
  vocab.bos_id_ = vocab.add_entry(std::string(Vocabulary::kBos), 0);
  vocab.eos_id_ = vocab.add_entry(std::string(Vocabulary::kEos), 0);
  vocab.total_tokens_ += unk_count;
  return vocab;
}

std::vector<std::vector<WordId>> read_id_corpus(std::istream& in, const Vocabulary& vocab) {
  std::vector<std::vector<WordId>> corpus;
  std::string line;
  while (std::getline(in, line)) {
    const std::vector<std::string> tokens = tokenize_line(line);
    corpus.push_back(apply_vocabulary(tokens, vocab));
  }
  return corpus;
}

}  // namespace scembed
