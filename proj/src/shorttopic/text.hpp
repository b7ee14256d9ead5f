#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace shorttopic::text {

// Lowercases ASCII letters, treats ASCII alphanumerics and all bytes >= 0x80
// as word characters, everything else as a separator.
std::vector<std::string> tokenize(const std::string& raw);

class StopwordSet {
 public:
  // Built-in English list (same content as data/stopwords_en.txt).
  static StopwordSet english();
  static StopwordSet from_file(const std::filesystem::path& path);
  static StopwordSet empty() { return StopwordSet(); }

  bool contains(const std::string& token) const { return words_.count(token) > 0; }
  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

}  // namespace shorttopic::text
