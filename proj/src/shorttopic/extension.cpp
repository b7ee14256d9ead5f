#include "shorttopic/extension.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "shorttopic/common.hpp"
#include "shorttopic/tensor_io.hpp"
#include "shorttopic/text.hpp"

namespace shorttopic::ext {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kDefaultTemplate =
    "Given the short text: \"{Short Text}\", expand it into a detailed paragraph "
    "that provides background and elaborates on the key points to enrich its "
    "context. Try to make it as detailed as possible.";

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Whitespace token count; generator tokenization is opaque, so truncation is
// defined over whitespace tokens.
std::pair<std::string, int> truncate_tokens(const std::string& s, int max_tokens) {
  std::istringstream in(s);
  std::string tok, out;
  int count = 0;
  while (in >> tok && count < max_tokens) {
    if (count > 0) out += " ";
    out += tok;
    ++count;
  }
  return {out, count};
}

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char c : id) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  if (out.size() > 80) out.resize(80);
  return out;
}

json record_to_json(const ExtensionRecord& r) {
  return {{"doc_id", r.doc_id},
          {"short_text", r.short_text},
          {"long_text", r.long_text},
          {"generator_name", r.generator_name},
          {"prompt_hash", r.prompt_hash},
          {"created_at", r.created_at},
          {"status", r.status},
          {"generated_tokens", r.generated_tokens}};
}

ExtensionRecord record_from_json(const json& j) {
  ExtensionRecord r;
  r.doc_id = j.at("doc_id").get<std::string>();
  r.short_text = j.value("short_text", "");
  r.long_text = j.value("long_text", "");
  r.generator_name = j.value("generator_name", "");
  r.prompt_hash = j.value("prompt_hash", "");
  r.created_at = j.value("created_at", "");
  r.status = j.value("status", "ok");
  r.generated_tokens = j.value("generated_tokens", 0);
  return r;
}

}  // namespace

TemplateRegistry::TemplateRegistry() { templates_["default"] = kDefaultTemplate; }

void TemplateRegistry::add(const std::string& id, const std::string& text) {
  templates_[id] = text;
}

const std::string& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw_config("UnknownTemplate", "no prompt template with id '" + id + "'");
  }
  return it->second;
}

std::string render_prompt(const std::string& short_text, const std::string& template_id,
                          const TemplateRegistry& registry) {
  std::string out = registry.get(template_id);
  const std::string placeholder = "{Short Text}";
  auto pos = out.find(placeholder);
  while (pos != std::string::npos) {
    out.replace(pos, placeholder.size(), short_text);
    pos = out.find(placeholder, pos + short_text.size());
  }
  return out;
}

std::string prompt_hash(const std::string& short_text, const std::string& template_text,
                        const GenerationParams& params) {
  uint64_t h = fnv1a64(template_text);
  h = fnv1a64(short_text, h);
  h = fnv1a64(std::to_string(params.max_new_tokens) + "|" + std::to_string(params.beam_size),
              h);
  return to_hex(h);
}

ExtensionCache::ExtensionCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

fs::path ExtensionCache::path_for(const std::string& doc_id, const std::string& hash) const {
  return dir_ / (sanitize_id(doc_id) + "." + hash + ".json");
}

std::optional<ExtensionRecord> ExtensionCache::lookup(const std::string& doc_id,
                                                      const std::string& hash) const {
  fs::path p = path_for(doc_id, hash);
  if (!fs::exists(p)) return std::nullopt;
  try {
    ExtensionRecord r = record_from_json(read_json_file(p));
    if (r.prompt_hash != hash || r.doc_id != doc_id) return std::nullopt;
    return r;
  } catch (const Error&) {
    return std::nullopt;  // unreadable cache entry: regenerate
  }
}

void ExtensionCache::store(const ExtensionRecord& record) const {
  atomic_write_file(path_for(record.doc_id, record.prompt_hash),
                    record_to_json(record).dump(2) + "\n");
}

ExtensionRecord extend(const std::string& doc_id, const std::string& short_text,
                       Generator& generator, const GenerationParams& params,
                       const TemplateRegistry& registry) {
  GenerationRequest request;
  request.prompt = render_prompt(short_text, params.template_id, registry);
  request.short_text = short_text;
  request.params = params;

  const std::string raw = generator.generate(request);
  auto [truncated, tokens] = truncate_tokens(raw, params.max_new_tokens);
  if (tokens == 0) {
    throw_runtime("EmptyGeneration", "generator returned no tokens for " + doc_id);
  }

  ExtensionRecord record;
  record.doc_id = doc_id;
  record.short_text = short_text;
  record.long_text = truncated;
  record.generator_name = generator.name();
  record.prompt_hash =
      prompt_hash(short_text, registry.get(params.template_id), params);
  record.created_at = now_iso8601();
  record.generated_tokens = tokens;
  return record;
}

std::vector<ExtensionRecord> extend_corpus(const corpus::Corpus& corpus,
                                           Generator& generator,
                                           const GenerationParams& params,
                                           const ExtensionCache& cache,
                                           const ExtendCorpusOptions& options,
                                           ExtensionReport* report,
                                           const TemplateRegistry& registry) {
  const size_t n = corpus.num_docs();
  const std::string template_text = registry.get(params.template_id);

  std::vector<std::optional<ExtensionRecord>> slots(n);
  ExtensionReport local_report;
  std::mutex report_mutex;
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      const auto& doc = corpus.docs[i];
      const std::string hash = prompt_hash(doc.raw_text, template_text, params);
      if (auto cached = cache.lookup(doc.id, hash)) {
        slots[i] = std::move(cached);
        std::lock_guard lock(report_mutex);
        local_report.cache_hits++;
        continue;
      }
      try {
        ExtensionRecord record;
        try {
          record = extend(doc.id, doc.raw_text, generator, params, registry);
        } catch (const Error& e) {
          if (e.kind() != "EmptyGeneration") throw;
          // fall back to the short text so the corpus stays aligned
          record.doc_id = doc.id;
          record.short_text = doc.raw_text;
          record.long_text = doc.raw_text;
          record.generator_name = generator.name();
          record.prompt_hash = hash;
          record.created_at = now_iso8601();
          record.status = "fallback";
          record.generated_tokens = 0;
          std::lock_guard lock(report_mutex);
          local_report.fallbacks++;
        }
        cache.store(record);
        slots[i] = std::move(record);
        std::lock_guard lock(report_mutex);
        local_report.generated++;
      } catch (const Error& e) {
        std::lock_guard lock(report_mutex);
        local_report.failures.push_back({doc.id, e.kind(), e.what()});
      }
    }
  };

  int threads = std::max(1, options.max_parallel);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (!local_report.failures.empty() &&
      static_cast<double>(local_report.failures.size()) >
          options.fail_threshold * static_cast<double>(n)) {
    throw_runtime("ExtensionFailureRate",
                  std::to_string(local_report.failures.size()) + " of " +
                      std::to_string(n) + " documents failed to extend");
  }

  std::vector<ExtensionRecord> records;
  records.reserve(n);
  for (auto& slot : slots) {
    if (slot) records.push_back(std::move(*slot));
  }
  if (report) *report = std::move(local_report);
  return records;
}

void save_extensions(const std::vector<ExtensionRecord>& records,
                     const ExtensionReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  json index = json::array();
  for (const auto& r : records) index.push_back(record_to_json(r));
  write_json_file(dir / "index.json", index);

  json rep;
  rep["generated"] = report.generated;
  rep["cache_hits"] = report.cache_hits;
  rep["fallbacks"] = report.fallbacks;
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"doc_id", f.doc_id}, {"kind", f.kind}, {"message", f.message}});
  }
  rep["failures"] = failures;
  write_json_file(dir / "report.json", rep);
}

std::vector<ExtensionRecord> load_extensions(const fs::path& dir) {
  fs::path index = dir / "index.json";
  if (!fs::exists(index)) {
    throw_missing("MissingExtensions", "no extension index at " + index.string());
  }
  std::vector<ExtensionRecord> records;
  for (const auto& j : read_json_file(index)) records.push_back(record_from_json(j));
  return records;
}

}  // namespace shorttopic::ext
