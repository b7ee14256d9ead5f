#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace shorttopic::ext {

struct GenerationParams {
  int max_new_tokens = 500;
  int beam_size = 5;
  std::string template_id = "default";
};

struct GenerationRequest {
  std::string prompt;      // fully rendered prompt
  std::string short_text;  // original input, used by the mock generators
  GenerationParams params;
};

// Conditional text generator M. Implementations throw Error
// ("GeneratorUnavailable") on transport failure after bounded retries.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string name() const = 0;
  virtual std::string generate(const GenerationRequest& request) = 0;
};

// Repeats the input text `repeat` times. Deterministic.
class MockEchoGenerator : public Generator {
 public:
  explicit MockEchoGenerator(int repeat = 3) : repeat_(repeat) {}
  std::string name() const override { return "mock-echo"; }
  std::string generate(const GenerationRequest& request) override;

 private:
  int repeat_;
};

// Expands each token of the input into the token plus its synonyms from a
// fixed table, `passes` times over. Deterministic; gives desk-scale tests
// semantically meaningful "long" texts.
class MockLexiconGenerator : public Generator {
 public:
  using Lexicon = std::map<std::string, std::vector<std::string>>;

  explicit MockLexiconGenerator(Lexicon lexicon, int passes = 2)
      : lexicon_(std::move(lexicon)), passes_(passes) {}
  static Lexicon load_lexicon(const std::filesystem::path& json_path);

  std::string name() const override { return "mock-lexicon"; }
  std::string generate(const GenerationRequest& request) override;

 private:
  Lexicon lexicon_;
  int passes_;
};

// HTTP client for a remote completion service.
// POST <base_url><path> with {"prompt","max_new_tokens","beam_size"},
// expects {"text": "..."}; bearer token read from SHORTTOPIC_GENERATOR_TOKEN.
class RemoteGenerator : public Generator {
 public:
  struct Options {
    std::string base_url;        // e.g. "http://localhost:8080"
    std::string path = "/generate";
    int max_retries = 3;
    int retry_backoff_ms = 200;
    int timeout_sec = 60;
  };

  explicit RemoteGenerator(Options options);
  std::string name() const override { return "remote"; }
  std::string generate(const GenerationRequest& request) override;

 private:
  Options options_;
  std::string host_;
  int port_ = 80;
};

struct GeneratorConfig {
  std::string kind = "mock-echo";  // mock-echo | mock-lexicon | remote
  int echo_repeat = 3;
  int lexicon_passes = 2;
  std::string lexicon_path;
  std::string base_url;
  std::string remote_path = "/generate";
  int max_retries = 3;
};

std::unique_ptr<Generator> make_generator(const GeneratorConfig& config);

}  // namespace shorttopic::ext
