#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "scembed/corpus.hpp"
#include "test_corpora.hpp"

using namespace scembed;

namespace {

Vocabulary vocab_of(const std::string& corpus, std::int64_t min_count) {
  std::istringstream in(corpus);
  return build_vocabulary(in, min_count);
}

}  // namespace

TEST_CASE("tokenize_line splits on whitespace runs") {
  CHECK(tokenize_line("a  b c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize_line("").empty());
  CHECK(tokenize_line(" \t ").empty());
  CHECK(tokenize_line("Steve Martin has") == std::vector<std::string>{"Steve", "Martin", "has"});
  CHECK(tokenize_line("\ta b\t") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("tokenize_line rejects invalid UTF-8") {
  CHECK_THROWS_AS(tokenize_line("ab\xC0\xAF cd"), ParseError);
  CHECK_THROWS_AS(tokenize_line(std::string("ok \xE2\x82")), ParseError);  // truncated
  CHECK_NOTHROW(tokenize_line("caf\xC3\xA9 na\xC3\xAFve \xE2\x82\xAC"));
}

TEST_CASE("lowercase filter arithmetic") {
  CHECK(line_passes_lowercase_filter("the cat sat", 0.9));
  CHECK_FALSE(line_passes_lowercase_filter("THE CAT SAT", 0.9));
  // 6 lowercase of 8 non-whitespace = 0.75 < 0.9
  CHECK_FALSE(line_passes_lowercase_filter("AB cdefgh", 0.9));
  CHECK(line_passes_lowercase_filter("AB cdefgh", 0.75));
  CHECK(line_passes_lowercase_filter("", 0.9));
  CHECK_THROWS_AS(line_passes_lowercase_filter("x", 1.5), ValidationError);
}

TEST_CASE("clean_corpus filters and is idempotent") {
  std::istringstream in("the cat sat\nTHE CAT SAT\nAB cdefgh\nlower only\n");
  std::ostringstream once;
  CHECK(clean_corpus(in, once, 0.9) == 2);
  CHECK(once.str() == "the cat sat\nlower only\n");

  std::istringstream again_in(once.str());
  std::ostringstream twice;
  clean_corpus(again_in, twice, 0.9);
  CHECK(twice.str() == once.str());
}

TEST_CASE("build_vocabulary counts, absorbs rare words, orders ids") {
  SUBCASE("min_count 2 absorbs singletons") {
    const Vocabulary v = vocab_of("a a b\n", 2);
    CHECK(v.num_content() == 1);
    CHECK(v.count(v.id_or_unk("a")) == 2);
    CHECK(v.count(v.unk_id()) == 1);
  }
  SUBCASE("min_count 1 keeps everything") {
    const Vocabulary v = vocab_of("a b\n", 1);
    CHECK(v.num_content() == 2);
    CHECK(v.count(v.id_or_unk("a")) == 1);
    CHECK(v.count(v.unk_id()) == 0);
  }
  SUBCASE("ids in descending count order") {
    const Vocabulary v = vocab_of("a a a b b c\n", 2);
    CHECK(v.id_or_unk("a") == 0);
    CHECK(v.id_or_unk("b") == 1);
    CHECK(v.count(v.unk_id()) == 1);  // absorbs c
  }
  SUBCASE("count ties break lexicographically") {
    const Vocabulary v = vocab_of("z z q q m m\n", 1);
    CHECK(v.id_or_unk("m") == 0);
    CHECK(v.id_or_unk("q") == 1);
    CHECK(v.id_or_unk("z") == 2);
  }
  SUBCASE("empty corpus is an error") {
    CHECK_THROWS_AS(vocab_of("", 1), ValidationError);
    CHECK_THROWS_AS(vocab_of("\n \n", 1), ValidationError);
  }
  SUBCASE("reserved markers in content are rejected") {
    CHECK_THROWS_AS(vocab_of("a <s> b\n", 1), ValidationError);
    CHECK_THROWS_AS(vocab_of("a </s>\n", 1), ValidationError);
    CHECK_THROWS_AS(vocab_of("a <unk>\n", 1), ValidationError);
  }
}

TEST_CASE("token conservation: retained counts plus unk equals total") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    for (std::int64_t min_count : {1, 2, 3}) {
      const auto corpus = testing::make_desk_corpus(60, 40, seed, min_count);
      std::int64_t total_tokens = 0;
      for (const auto& sentence : corpus.ids) {
        total_tokens += static_cast<std::int64_t>(sentence.size());
      }
      std::int64_t counted = 0;
      for (WordId id = 0; id < corpus.vocab.size(); ++id) counted += corpus.vocab.count(id);
      CHECK(counted == total_tokens);
      CHECK(corpus.vocab.total_tokens() == total_tokens);
    }
  }
}

TEST_CASE("apply_vocabulary maps words, unknowns, and markers") {
  const Vocabulary v = vocab_of("a a b b\n", 1);
  const std::vector<std::string> words{"a", "b"};
  CHECK(apply_vocabulary(words, v) == std::vector<WordId>{0, 1});

  const std::vector<std::string> with_oov{"a", "zzz"};
  CHECK(apply_vocabulary(with_oov, v) == std::vector<WordId>{0, v.unk_id()});

  CHECK(apply_vocabulary(std::vector<std::string>{}, v).empty());

  // literal marker strings in content never become boundary ids
  const std::vector<std::string> markers{"<s>", "</s>"};
  CHECK(apply_vocabulary(markers, v) == std::vector<WordId>{v.unk_id(), v.unk_id()});

  // ids always stay below the vocabulary size
  for (std::uint64_t seed : {7ull, 8ull}) {
    const auto corpus = testing::make_desk_corpus(40, 25, seed, 2);
    for (const auto& sentence : corpus.ids) {
      for (WordId id : sentence) {
        CHECK(id >= 0);
        CHECK(id < corpus.vocab.size());
      }
    }
  }
}

TEST_CASE("identical input bytes give identical vocabularies") {
  const auto lines = testing::synthetic_lines(80, 50, 42);
  std::ostringstream joined;
  for (const auto& line : lines) joined << line << '\n';
  const Vocabulary a = vocab_of(joined.str(), 2);
  const Vocabulary b = vocab_of(joined.str(), 2);
  REQUIRE(a.size() == b.size());
  for (WordId id = 0; id < a.size(); ++id) {
    CHECK(a.word(id) == b.word(id));
    CHECK(a.count(id) == b.count(id));
  }
  CHECK(a.unk_id() == b.unk_id());
}

TEST_CASE("vocabulary file round trip") {
  const Vocabulary v = vocab_of("a a a b b c\n", 2);
  std::ostringstream out;
  write_vocabulary(v, out);
  // <unk> first, then descending count
  CHECK(out.str().rfind("<unk>\t1\n", 0) == 0);

  std::istringstream in(out.str());
  const Vocabulary back = read_vocabulary(in, "test.vocab");
  REQUIRE(back.size() == v.size());
  for (WordId id = 0; id < v.size(); ++id) {
    CHECK(back.word(id) == v.word(id));
    CHECK(back.count(id) == v.count(id));
  }
  CHECK(back.unk_id() == v.unk_id());
  CHECK(back.bos_id() == v.bos_id());
  CHECK(back.eos_id() == v.eos_id());
}

TEST_CASE("vocabulary file parse errors") {
  std::istringstream missing_unk("a\t3\nb\t2\n");
  CHECK_THROWS_AS(read_vocabulary(missing_unk, "bad.vocab"), ParseError);
  std::istringstream no_tab("<unk>\t0\nabc\n");
  CHECK_THROWS_AS(read_vocabulary(no_tab, "bad.vocab"), ParseError);
  std::istringstream bad_count("<unk>\t0\na\tx\n");
  CHECK_THROWS_AS(read_vocabulary(bad_count, "bad.vocab"), ParseError);
}
