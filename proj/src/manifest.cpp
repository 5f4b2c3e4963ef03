#include "scembed/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

namespace scembed {

std::uint64_t digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for digesting");
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::vector<char> buffer(1 << 16);
  while (in.read(buffer.data(), static_cast<std::streamsize>(buffer.size())) || in.gcount() > 0) {
    h = fnv1a64(buffer.data(), static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace

void write_manifest(const std::string& manifest_path, std::string_view stage,
                    std::uint64_t config_hash, std::uint64_t seed,
                    std::span<const std::string> inputs, std::span<const std::string> outputs) {
  std::ofstream out(manifest_path);
  if (!out) throw IoError("cannot write manifest " + manifest_path);
  out << "stage=" << stage << '\n';
  out << "config_hash=" << hex64(config_hash) << '\n';
  out << "seed=" << seed << '\n';
  for (const std::string& input : inputs) {
    out << "input=" << input << " fnv1a64:" << hex64(digest_file(input)) << '\n';
  }
  for (const std::string& output : outputs) {
    out << "output=" << output << '\n';
  }
  if (!out) throw IoError("write failed for manifest " + manifest_path);
}

}  // namespace scembed
