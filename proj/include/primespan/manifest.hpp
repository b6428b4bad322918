#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "primespan/sha256.hpp"

namespace primespan {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Reproducibility record for one subcommand run.  Keys are emitted sorted
// (std::map order) so the JSON itself is byte-stable for identical runs
// apart from the wall_seconds field.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> parameters;
  uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> digests;  // file name -> sha256 of content

  void add_output(const std::string& name, const std::string& path) {
    digests[name] = sha256_hex_of_file(path);
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "{\n";
    out << "  \"digests\": {";
    bool first = true;
    for (const auto& [k, v] : digests) {
      out << (first ? "\n" : ",\n") << "    \"" << json_escape(k) << "\": \""
          << json_escape(v) << "\"";
      first = false;
    }
    out << (digests.empty() ? "},\n" : "\n  },\n");
    out << "  \"parameters\": {";
    first = true;
    for (const auto& [k, v] : parameters) {
      out << (first ? "\n" : ",\n") << "    \"" << json_escape(k) << "\": \""
          << json_escape(v) << "\"";
      first = false;
    }
    out << (parameters.empty() ? "},\n" : "\n  },\n");
    out << "  \"seed\": " << seed << ",\n";
    out << "  \"subcommand\": \"" << json_escape(subcommand) << "\",\n";
    out << "  \"version\": \"" << json_escape(version) << "\",\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", wall_seconds);
    out << "  \"wall_seconds\": " << buf << "\n";
    out << "}\n";
  }
};

}  // namespace primespan
