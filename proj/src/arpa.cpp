#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "scembed/ngram.hpp"

namespace scembed {

namespace {

constexpr double kLn10 = 2.302585092994045684;
// Conventional stand-in score for entries that exist only to carry a
// backoff weight (e.g. the begin marker's unigram line).
constexpr double kDummyLog10 = -99.0;

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) fields.push_back(field);
  return fields;
}

}  // namespace

void write_arpa(const NgramModel& model, std::ostream& out) {
  const int n = model.order();
  out << "\\data\\\n";
  for (int k = 1; k <= n; ++k) {
    out << "ngram " << k << "=" << model.entries(k).size() << "\n";
  }
  for (int k = 1; k <= n; ++k) {
    out << "\n\\" << k << "-grams:\n";
    for (const Gram& gram : model.sorted_grams(k)) {
      const NgramEntry* entry = model.find(gram.view());
      const double log10p = entry->has_prob ? entry->logp / kLn10 : kDummyLog10;
      out << format_fixed(log10p, 6) << '\t';
      for (std::int32_t i = 0; i < gram.len; ++i) {
        if (i > 0) out << ' ';
        out << model.vocab().word(gram.ids[static_cast<std::size_t>(i)]);
      }
      if (entry->has_bow) {
        out << '\t' << format_fixed(entry->bow / kLn10, 6);
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

NgramModel read_arpa(std::istream& in, std::string_view source_name) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    if (required) throw ParseError(source_name, line_no, "unexpected end of file");
    return false;
  };

  next_line(true);
  if (line != "\\data\\") {
    throw ParseError(source_name, line_no, "expected \\data\\ header");
  }

  std::vector<std::size_t> declared;
  while (next_line(true)) {
    if (line.rfind("ngram ", 0) != 0) break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source_name, line_no, "malformed ngram count line");
    int k = 0;
    std::size_t count = 0;
    try {
      k = std::stoi(line.substr(6, eq - 6));
      count = static_cast<std::size_t>(std::stoull(line.substr(eq + 1)));
    } catch (const std::exception&) {
      throw ParseError(source_name, line_no, "malformed ngram count line");
    }
    if (k != static_cast<int>(declared.size()) + 1) {
      throw ParseError(source_name, line_no, "ngram counts must cover orders 1..n in sequence");
    }
    declared.push_back(count);
  }
  if (declared.empty()) throw ParseError(source_name, line_no, "no ngram counts declared");
  const int order = static_cast<int>(declared.size());
  if (order > kMaxOrder) throw ParseError(source_name, line_no, "model order exceeds supported maximum");

  // Two passes over the section data are avoided by buffering rows as
  // strings until the vocabulary (unigram section) is complete.
  struct Row {
    double log10p;
    std::vector<std::string> words;
    bool has_bow;
    double bow10;
    std::size_t line_no;
  };
  std::vector<std::vector<Row>> sections(static_cast<std::size_t>(order));

  for (int k = 1; k <= order; ++k) {
    const std::string header = "\\" + std::to_string(k) + "-grams:";
    if (line != header) {
      throw ParseError(source_name, line_no, "expected section header " + header);
    }
    auto& rows = sections[static_cast<std::size_t>(k - 1)];
    rows.reserve(declared[static_cast<std::size_t>(k - 1)]);
    while (next_line(true)) {
      if (!line.empty() && line[0] == '\\') break;  // next section header
      std::vector<std::string> fields = split_ws(line);
      const std::size_t want = static_cast<std::size_t>(k) + 1;
      if (fields.size() != want && fields.size() != want + 1) {
        throw ParseError(source_name, line_no, "expected \"logprob " + std::to_string(k) +
                                                   " words [backoff]\"");
      }
      Row row;
      try {
        row.log10p = std::stod(fields[0]);
      } catch (const std::exception&) {
        throw ParseError(source_name, line_no, "bad log-probability field");
      }
      row.has_bow = fields.size() == want + 1;
      row.bow10 = 0.0;
      if (row.has_bow) {
        try {
          row.bow10 = std::stod(fields.back());
        } catch (const std::exception&) {
          throw ParseError(source_name, line_no, "bad backoff field");
        }
      }
      row.words.assign(fields.begin() + 1, fields.begin() + 1 + k);
      row.line_no = line_no;
      rows.push_back(std::move(row));
    }
    if (rows.size() != declared[static_cast<std::size_t>(k - 1)]) {
      throw ParseError(source_name, line_no,
                       "section \\" + std::to_string(k) + "-grams: has " + std::to_string(rows.size()) +
                           " entries but \\data\\ declares " +
                           std::to_string(declared[static_cast<std::size_t>(k - 1)]));
    }
  }
  if (line != "\\end\\") {
    throw ParseError(source_name, line_no, "expected \\end\\");
  }

  std::vector<std::string> unigram_words;
  unigram_words.reserve(sections[0].size());
  for (const Row& row : sections[0]) unigram_words.push_back(row.words[0]);
  Vocabulary vocab = Vocabulary::from_word_list(unigram_words);

  NgramModel model(order, std::move(vocab));
  for (int k = 1; k <= order; ++k) {
    std::vector<WordId> ids(static_cast<std::size_t>(k));
    for (const Row& row : sections[static_cast<std::size_t>(k - 1)]) {
      for (int i = 0; i < k; ++i) {
        const std::string& w = row.words[static_cast<std::size_t>(i)];
        if (!model.vocab().contains(w)) {
          throw ParseError(source_name, row.line_no, "word \"" + w + "\" not in unigram section");
        }
        ids[static_cast<std::size_t>(i)] = model.vocab().id_or_unk(w);
      }
      model.set_prob(ids, row.log10p * kLn10);
      if (row.has_bow) model.set_bow(ids, row.bow10 * kLn10);
    }
  }
  return model;
}

}  // namespace scembed
