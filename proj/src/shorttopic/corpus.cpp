#include "shorttopic/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "shorttopic/common.hpp"
#include "shorttopic/tensor_io.hpp"

namespace shorttopic::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

text::StopwordSet PreprocessOptions::load_stopwords() const {
  if (stopwords_path) return text::StopwordSet::from_file(*stopwords_path);
  return text::StopwordSet::english();
}

std::vector<std::string> preprocess(const std::string& raw_text,
                                    const PreprocessOptions& options,
                                    const text::StopwordSet& stopwords) {
  std::vector<std::string> out;
  for (auto& tok : text::tokenize(raw_text)) {
    if (static_cast<int>(tok.size()) < options.min_token_len) continue;
    if (stopwords.contains(tok)) continue;
    out.push_back(tok);
  }
  return out;
}

Vocabulary build_vocabulary(const std::vector<Document>& docs, int min_df,
                            double max_df_fraction) {
  if (docs.empty()) throw_runtime("EmptyVocabulary", "no documents");

  std::map<std::string, int64_t> doc_freq;
  std::map<std::string, int64_t> term_freq;
  for (const auto& doc : docs) {
    std::map<std::string, int64_t> local;
    for (const auto& tok : doc.tokens) local[tok]++;
    for (const auto& [tok, count] : local) {
      doc_freq[tok]++;
      term_freq[tok] += count;
    }
  }

  const double max_df = max_df_fraction * static_cast<double>(docs.size());
  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto& [tok, df] : doc_freq) {
    if (df >= min_df && static_cast<double>(df) <= max_df) {
      kept.emplace_back(tok, term_freq[tok]);
    }
  }
  if (kept.empty()) {
    throw_runtime("EmptyVocabulary",
                  "no token survives min_df=" + std::to_string(min_df) +
                      " max_df_fraction=" + std::to_string(max_df_fraction));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  vocab.id_to_token.reserve(kept.size());
  for (const auto& [tok, freq] : kept) {
    vocab.token_to_id[tok] = static_cast<int32_t>(vocab.id_to_token.size());
    vocab.id_to_token.push_back(tok);
  }
  return vocab;
}

BowVector bow_vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::map<int32_t, int32_t> counts;
  for (const auto& tok : tokens) {
    if (auto id = vocab.lookup(tok)) counts[*id]++;
  }
  BowVector bow;
  bow.entries.assign(counts.begin(), counts.end());
  for (const auto& [id, c] : bow.entries) bow.total += c;
  return bow;
}

std::vector<std::string> Corpus::labels() const {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.label);
  return out;
}

Corpus build_corpus_from_tsv(const fs::path& dataset, const PreprocessOptions& options) {
  std::ifstream in(dataset);
  if (!in) throw_missing("MissingArtifact", "dataset not found: " + dataset.string());

  const text::StopwordSet stopwords = options.load_stopwords();

  std::vector<Document> parsed;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Document doc;
    doc.id = "doc" + std::to_string(line_no);
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      doc.raw_text = line;
    } else {
      doc.label = line.substr(0, tab);
      doc.raw_text = line.substr(tab + 1);
    }
    doc.tokens = preprocess(doc.raw_text, options, stopwords);
    parsed.push_back(std::move(doc));
  }
  if (parsed.empty()) throw_runtime("EmptyVocabulary", "dataset has no documents");

  Corpus corpus;
  corpus.options = options;

  std::vector<Document> nonempty;
  for (auto& doc : parsed) {
    if (doc.tokens.empty()) {
      std::cerr << "[shorttopic] warn: dropping " << doc.id
                << " (empty after preprocessing)\n";
      corpus.dropped.push_back({doc.id, "empty_after_preprocessing"});
    } else {
      nonempty.push_back(std::move(doc));
    }
  }
  if (nonempty.empty()) throw_runtime("EmptyVocabulary", "all documents empty after preprocessing");

  corpus.vocab = build_vocabulary(nonempty, options.min_df, options.max_df_fraction);

  for (auto& doc : nonempty) {
    BowVector bow = bow_vectorize(doc.tokens, corpus.vocab);
    if (bow.total == 0) {
      std::cerr << "[shorttopic] warn: dropping " << doc.id
                << " (no in-vocabulary tokens)\n";
      corpus.dropped.push_back({doc.id, "empty_bow"});
      continue;
    }
    corpus.docs.push_back(std::move(doc));
    corpus.bows.push_back(std::move(bow));
  }
  if (corpus.docs.empty()) throw_runtime("EmptyVocabulary", "all documents out of vocabulary");
  return corpus;
}

BowVector vectorize_text(const std::string& raw_text, const Corpus& corpus,
                         const text::StopwordSet& stopwords) {
  return bow_vectorize(preprocess(raw_text, corpus.options, stopwords), corpus.vocab);
}

void save_corpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);

  json vocab_json;
  vocab_json["token_to_id"] = json::object();
  for (const auto& tok : corpus.vocab.id_to_token) {
    vocab_json["token_to_id"][tok] = corpus.vocab.token_to_id.at(tok);
  }
  vocab_json["id_to_token"] = corpus.vocab.id_to_token;
  vocab_json["size"] = corpus.vocab.size();
  write_json_file(dir / "vocab.json", vocab_json);

  // CSR bow matrix
  std::vector<int32_t> indptr{0}, indices, data;
  for (const auto& bow : corpus.bows) {
    for (const auto& [id, c] : bow.entries) {
      indices.push_back(id);
      data.push_back(c);
    }
    indptr.push_back(static_cast<int32_t>(indices.size()));
  }
  TensorWriter writer;
  writer.add_i32("indptr", {static_cast<int64_t>(indptr.size())}, indptr.data());
  writer.add_i32("indices", {static_cast<int64_t>(indices.size())}, indices.data());
  writer.add_i32("data", {static_cast<int64_t>(data.size())}, data.data());
  writer.meta()["format"] = "csr";
  writer.meta()["shape"] = {corpus.docs.size(), static_cast<size_t>(corpus.vocab.size())};
  writer.write(dir / "bow");

  json manifest;
  manifest["num_docs"] = corpus.docs.size();
  manifest["vocab_size"] = corpus.vocab.size();
  json ids = json::array(), labels = json::array();
  for (const auto& d : corpus.docs) {
    ids.push_back(d.id);
    labels.push_back(d.label);
  }
  manifest["doc_ids"] = ids;
  manifest["labels"] = labels;
  json dropped = json::array();
  for (const auto& d : corpus.dropped) dropped.push_back({{"id", d.id}, {"reason", d.reason}});
  manifest["dropped"] = dropped;
  manifest["options"] = {{"min_token_len", corpus.options.min_token_len},
                         {"min_df", corpus.options.min_df},
                         {"max_df_fraction", corpus.options.max_df_fraction}};
  write_json_file(dir / "manifest.json", manifest);

  std::string docs_buf;
  for (const auto& d : corpus.docs) {
    json rec = {{"id", d.id}, {"label", d.label}, {"raw_text", d.raw_text}, {"tokens", d.tokens}};
    docs_buf += rec.dump();
    docs_buf += "\n";
  }
  atomic_write_file(dir / "docs.jsonl", docs_buf);
}

Corpus load_corpus(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) {
    throw_missing("MissingArtifact", "not a corpus directory: " + dir.string());
  }
  Corpus corpus;

  json vocab_json = read_json_file(dir / "vocab.json");
  corpus.vocab.id_to_token = vocab_json.at("id_to_token").get<std::vector<std::string>>();
  for (size_t i = 0; i < corpus.vocab.id_to_token.size(); ++i) {
    corpus.vocab.token_to_id[corpus.vocab.id_to_token[i]] = static_cast<int32_t>(i);
  }

  json manifest = read_json_file(dir / "manifest.json");
  corpus.options.min_token_len = manifest["options"].value("min_token_len", 3);
  corpus.options.min_df = manifest["options"].value("min_df", 2);
  corpus.options.max_df_fraction = manifest["options"].value("max_df_fraction", 0.5);
  for (const auto& d : manifest.value("dropped", json::array())) {
    corpus.dropped.push_back({d.value("id", ""), d.value("reason", "")});
  }

  std::ifstream docs_in(dir / "docs.jsonl");
  if (!docs_in) throw_missing("MissingArtifact", "missing docs.jsonl in " + dir.string());
  std::string line;
  while (std::getline(docs_in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    Document d;
    d.id = rec.at("id").get<std::string>();
    d.label = rec.value("label", "");
    d.raw_text = rec.value("raw_text", "");
    d.tokens = rec.value("tokens", std::vector<std::string>{});
    corpus.docs.push_back(std::move(d));
  }

  TensorReader reader(dir / "bow");
  std::vector<int32_t> indptr = reader.read_i32("indptr");
  std::vector<int32_t> indices = reader.read_i32("indices");
  std::vector<int32_t> data = reader.read_i32("data");
  if (indptr.size() != corpus.docs.size() + 1) {
    throw_runtime("CorruptArtifact", "bow matrix does not match docs.jsonl");
  }
  for (size_t d = 0; d + 1 < indptr.size(); ++d) {
    BowVector bow;
    for (int32_t i = indptr[d]; i < indptr[d + 1]; ++i) {
      bow.entries.emplace_back(indices[static_cast<size_t>(i)], data[static_cast<size_t>(i)]);
      bow.total += data[static_cast<size_t>(i)];
    }
    corpus.bows.push_back(std::move(bow));
  }
  return corpus;
}

}  // namespace shorttopic::corpus
