#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "shorttopic/text.hpp"

namespace shorttopic::corpus {

struct PreprocessOptions {
  int min_token_len = 3;
  int min_df = 2;
  double max_df_fraction = 0.5;
  std::optional<std::filesystem::path> stopwords_path;  // default: built-in English

  text::StopwordSet load_stopwords() const;
};

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;
  std::string label;  // empty when unlabeled
};

struct Vocabulary {
  std::unordered_map<std::string, int32_t> token_to_id;
  std::vector<std::string> id_to_token;

  int32_t size() const { return static_cast<int32_t>(id_to_token.size()); }
  std::optional<int32_t> lookup(const std::string& token) const {
    auto it = token_to_id.find(token);
    if (it == token_to_id.end()) return std::nullopt;
    return it->second;
  }
};

// Sparse counts, entries sorted by token id.
struct BowVector {
  std::vector<std::pair<int32_t, int32_t>> entries;
  int64_t total = 0;
};

struct DroppedDoc {
  std::string id;
  std::string reason;
};

struct Corpus {
  std::vector<Document> docs;       // retained documents, dataset order
  std::vector<BowVector> bows;      // aligned with docs
  Vocabulary vocab;
  std::vector<DroppedDoc> dropped;
  PreprocessOptions options;

  size_t num_docs() const { return docs.size(); }
  std::vector<std::string> labels() const;
};

std::vector<std::string> preprocess(const std::string& raw_text,
                                    const PreprocessOptions& options,
                                    const text::StopwordSet& stopwords);

// Tokens kept iff document frequency in [min_df, max_df_fraction * |docs|].
// Ids assigned by (corpus frequency desc, token asc). Throws EmptyVocabulary.
Vocabulary build_vocabulary(const std::vector<Document>& docs, int min_df,
                            double max_df_fraction);

BowVector bow_vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab);

// Dataset file: one document per line, `label<TAB>text`, UTF-8.
// Documents emptied by preprocessing or vectorization are dropped and noted.
Corpus build_corpus_from_tsv(const std::filesystem::path& dataset,
                             const PreprocessOptions& options);

// Re-vectorizes replacement texts (e.g. LLM extensions) against an existing
// vocabulary with the corpus' preprocessing rules.
BowVector vectorize_text(const std::string& raw_text, const Corpus& corpus,
                         const text::StopwordSet& stopwords);

// Corpus directory: vocab.json, bow.bin/bow.json (CSR int32),
// manifest.json, docs.jsonl.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

}  // namespace shorttopic::corpus
