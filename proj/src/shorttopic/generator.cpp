#include "shorttopic/generator.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "shorttopic/common.hpp"
#include "shorttopic/tensor_io.hpp"
#include "shorttopic/text.hpp"

namespace shorttopic::ext {

using nlohmann::json;

std::string MockEchoGenerator::generate(const GenerationRequest& request) {
  std::string out;
  for (int i = 0; i < repeat_; ++i) {
    if (i > 0) out += " ";
    out += request.short_text;
  }
  return out;
}

MockLexiconGenerator::Lexicon MockLexiconGenerator::load_lexicon(
    const std::filesystem::path& json_path) {
  json j = read_json_file(json_path);
  Lexicon lexicon;
  for (auto it = j.begin(); it != j.end(); ++it) {
    lexicon[it.key()] = it.value().get<std::vector<std::string>>();
  }
  return lexicon;
}

std::string MockLexiconGenerator::generate(const GenerationRequest& request) {
  std::vector<std::string> tokens = text::tokenize(request.short_text);
  std::string out;
  for (int pass = 0; pass < passes_; ++pass) {
    for (const auto& tok : tokens) {
      if (!out.empty()) out += " ";
      out += tok;
      auto it = lexicon_.find(tok);
      if (it != lexicon_.end()) {
        for (const auto& syn : it->second) {
          out += " ";
          out += syn;
        }
      }
    }
  }
  return out;
}

RemoteGenerator::RemoteGenerator(Options options) : options_(std::move(options)) {
  std::string url = options_.base_url;
  auto scheme_pos = url.find("://");
  if (scheme_pos != std::string::npos) {
    if (url.substr(0, scheme_pos) != "http") {
      throw_config("ConfigError", "remote generator supports http:// urls, got " + url);
    }
    url = url.substr(scheme_pos + 3);
  }
  auto colon = url.find(':');
  if (colon == std::string::npos) {
    host_ = url;
    port_ = 80;
  } else {
    host_ = url.substr(0, colon);
    port_ = std::atoi(url.c_str() + colon + 1);
  }
  if (host_.empty() || port_ <= 0) {
    throw_config("ConfigError", "invalid generator base_url: " + options_.base_url);
  }
}

std::string RemoteGenerator::generate(const GenerationRequest& request) {
  json body = {{"prompt", request.prompt},
               {"max_new_tokens", request.params.max_new_tokens},
               {"beam_size", request.params.beam_size}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* token = std::getenv("SHORTTOPIC_GENERATOR_TOKEN")) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options_.retry_backoff_ms * attempt));
    }
    httplib::Client client(host_, port_);
    client.set_connection_timeout(options_.timeout_sec, 0);
    client.set_read_timeout(options_.timeout_sec, 0);
    auto res = client.Post(options_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status >= 500) {
      last_error = "server status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw_runtime("GeneratorUnavailable",
                    "generator returned status " + std::to_string(res->status));
    }
    try {
      json reply = json::parse(res->body);
      return reply.at("text").get<std::string>();
    } catch (const std::exception& e) {
      throw_runtime("GeneratorUnavailable",
                    std::string("malformed generator response: ") + e.what());
    }
  }
  throw_runtime("GeneratorUnavailable",
                "generator unreachable after " + std::to_string(options_.max_retries + 1) +
                    " attempts: " + last_error);
}

std::unique_ptr<Generator> make_generator(const GeneratorConfig& config) {
  if (config.kind == "mock-echo") {
    return std::make_unique<MockEchoGenerator>(config.echo_repeat);
  }
  if (config.kind == "mock-lexicon") {
    if (config.lexicon_path.empty()) {
      throw_config("ConfigError", "mock-lexicon generator requires generator.lexicon_path");
    }
    return std::make_unique<MockLexiconGenerator>(
        MockLexiconGenerator::load_lexicon(config.lexicon_path), config.lexicon_passes);
  }
  if (config.kind == "remote") {
    RemoteGenerator::Options options;
    options.base_url = config.base_url;
    options.path = config.remote_path;
    options.max_retries = config.max_retries;
    if (options.base_url.empty()) {
      throw_config("ConfigError", "remote generator requires generator.base_url");
    }
    return std::make_unique<RemoteGenerator>(options);
  }
  throw_config("ConfigError", "unknown generator kind: " + config.kind);
}

}  // namespace shorttopic::ext
