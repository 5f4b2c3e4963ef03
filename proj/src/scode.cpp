#include "scembed/scode.hpp"

#include <istream>
#include <map>
#include <sstream>

namespace scembed {

EmpiricalDistribution EmpiricalDistribution::from_pairs(std::span<const CooccurrencePair> pairs,
                                                        Eigen::Index num_x, Eigen::Index num_y) {
  if (pairs.empty()) throw ValidationError("cannot summarize an empty pair stream");
  EmpiricalDistribution emp;
  emp.px = Eigen::VectorXd::Zero(num_x);
  emp.py = Eigen::VectorXd::Zero(num_y);
  std::map<std::pair<Eigen::Index, Eigen::Index>, std::int64_t> joint_counts;
  for (const CooccurrencePair& pair : pairs) {
    if (pair.x < 0 || pair.x >= num_x || pair.y < 0 || pair.y >= num_y) {
      throw ValidationError("pair id out of range");
    }
    emp.px(pair.x) += 1.0;
    emp.py(pair.y) += 1.0;
    joint_counts[{pair.x, pair.y}] += 1;
  }
  emp.num_pairs = static_cast<std::int64_t>(pairs.size());
  const double n = static_cast<double>(emp.num_pairs);
  emp.px /= n;
  emp.py /= n;
  emp.joint.reserve(joint_counts.size());
  for (const auto& [key, count] : joint_counts) {
    emp.joint.emplace_back(key.first, key.second, static_cast<double>(count) / n);
  }
  return emp;
}

LoadedEmbeddings read_embeddings(std::istream& in, std::string_view source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, "missing header line");
  std::istringstream header(line);
  std::int64_t count = 0, dim = 0;
  if (!(header >> count >> dim) || count < 1 || dim < 1) {
    throw ParseError(source_name, 1, "header must be \"count dim\"");
  }
  LoadedEmbeddings loaded;
  loaded.words.reserve(static_cast<std::size_t>(count));
  loaded.vectors.resize(dim, count);
  std::size_t line_no = 1;
  for (std::int64_t c = 0; c < count; ++c) {
    if (!std::getline(in, line)) throw ParseError(source_name, line_no, "unexpected end of file");
    ++line_no;
    std::istringstream row(line);
    std::string word;
    if (!(row >> word)) throw ParseError(source_name, line_no, "missing word field");
    for (std::int64_t r = 0; r < dim; ++r) {
      double value = 0.0;
      if (!(row >> value)) throw ParseError(source_name, line_no, "expected " + std::to_string(dim) + " coordinates");
      loaded.vectors(r, c) = value;
    }
    double extra;
    if (row >> extra) throw ParseError(source_name, line_no, "too many coordinates");
    loaded.words.push_back(std::move(word));
  }
  return loaded;
}

}  // namespace scembed
