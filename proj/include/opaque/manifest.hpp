// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_MANIFEST_HPP
#define OPAQUE_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>

namespace opaque {

/// Provenance record written as manifest.json next to every output set.
/// Reruns with an equal manifest produce byte-identical CSVs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config_digests;  // path -> content hash
  std::uint64_t seed = 0;
  int worker_count = 1;
  std::string artifact_version;

  void add_config_file(const std::string& path);
  void add_config_content(const std::string& name, const std::string& content);
  void write(const std::string& out_dir) const;
};

std::string fnv1a_hex(const std::string& bytes);
std::string artifact_version();

}  // namespace opaque

#endif  // OPAQUE_MANIFEST_HPP
