// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opaque {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string artifact_version() { return "opaque 0.1.0"; }

void RunManifest::add_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  config_digests[path] = fnv1a_hex(ss.str());
}

void RunManifest::add_config_content(const std::string& name,
                                     const std::string& content) {
  config_digests[name] = fnv1a_hex(content);
}

void RunManifest::write(const std::string& out_dir) const {
  std::ofstream out(out_dir + "/manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in: " + out_dir);
  out << "{\n  \"command\": \"" << command << "\",\n  \"seed\": " << seed
      << ",\n  \"workers\": " << worker_count << ",\n  \"version\": \""
      << (artifact_version.empty() ? opaque::artifact_version() : artifact_version)
      << "\",\n  \"config_digests\": {";
  bool first = true;
  for (const auto& [name, digest] : config_digests) {
    out << (first ? "\n" : ",\n") << "    \"" << name << "\": \"" << digest << "\"";
    first = false;
  }
  out << (config_digests.empty() ? "" : "\n  ") << "}\n}\n";
}

}  // namespace opaque
