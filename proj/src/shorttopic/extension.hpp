#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shorttopic/corpus.hpp"
#include "shorttopic/generator.hpp"

namespace shorttopic::ext {

struct ExtensionRecord {
  std::string doc_id;
  std::string short_text;
  std::string long_text;
  std::string generator_name;
  std::string prompt_hash;  // hex
  std::string created_at;   // ISO-8601 UTC
  std::string status = "ok";  // "ok" | "fallback" (empty generation, copied input)
  int generated_tokens = 0;
};

class TemplateRegistry {
 public:
  TemplateRegistry();
  void add(const std::string& id, const std::string& text);
  const std::string& get(const std::string& id) const;  // throws UnknownTemplate

 private:
  std::map<std::string, std::string> templates_;
};

// Substitutes {Short Text} in the template. Throws UnknownTemplate.
std::string render_prompt(const std::string& short_text, const std::string& template_id,
                          const TemplateRegistry& registry = TemplateRegistry());

std::string prompt_hash(const std::string& short_text, const std::string& template_text,
                        const GenerationParams& params);

// One JSON file per document under the cache dir, written via atomic rename.
class ExtensionCache {
 public:
  explicit ExtensionCache(std::filesystem::path dir);

  std::optional<ExtensionRecord> lookup(const std::string& doc_id,
                                        const std::string& hash) const;
  void store(const ExtensionRecord& record) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path path_for(const std::string& doc_id, const std::string& hash) const;
};

// Generates the extension for one short text. Throws GeneratorUnavailable on
// transport failure and EmptyGeneration when the generator returns no tokens;
// extend_corpus catches EmptyGeneration and falls back to the short text.
ExtensionRecord extend(const std::string& doc_id, const std::string& short_text,
                       Generator& generator, const GenerationParams& params,
                       const TemplateRegistry& registry = TemplateRegistry());

struct ExtensionFailure {
  std::string doc_id;
  std::string kind;
  std::string message;
};

struct ExtensionReport {
  std::vector<ExtensionFailure> failures;
  size_t cache_hits = 0;
  size_t generated = 0;
  size_t fallbacks = 0;
};

struct ExtendCorpusOptions {
  double fail_threshold = 0.1;  // abort when failure fraction exceeds this
  int max_parallel = 1;
};

// One record per document in corpus order; cached records are not
// regenerated. Documents whose generation failed are reported and skipped.
std::vector<ExtensionRecord> extend_corpus(const corpus::Corpus& corpus,
                                           Generator& generator,
                                           const GenerationParams& params,
                                           const ExtensionCache& cache,
                                           const ExtendCorpusOptions& options,
                                           ExtensionReport* report = nullptr,
                                           const TemplateRegistry& registry = TemplateRegistry());

// Extensions directory: cache files + index.json (records in corpus order)
// + report.json.
void save_extensions(const std::vector<ExtensionRecord>& records,
                     const ExtensionReport& report, const std::filesystem::path& dir);
std::vector<ExtensionRecord> load_extensions(const std::filesystem::path& dir);

}  // namespace shorttopic::ext
