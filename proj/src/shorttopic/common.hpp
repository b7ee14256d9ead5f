#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shorttopic {

// Status codes shared by the C API and the CLI exit codes.
enum class Status : int {
  ok = 0,
  config_error = 2,
  missing_artifact = 3,
  runtime_error = 4,
};

// All recoverable failures are thrown as Error. `kind` is a stable
// machine-readable tag ("EmptyVocabulary", "GeneratorUnavailable", ...).
class Error : public std::runtime_error {
 public:
  Error(Status status, std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message),
        status_(status),
        kind_(std::move(kind)) {}

  Status status() const { return status_; }
  const std::string& kind() const { return kind_; }

 private:
  Status status_;
  std::string kind_;
};

[[noreturn]] inline void throw_config(const std::string& kind, const std::string& msg) {
  throw Error(Status::config_error, kind, msg);
}
[[noreturn]] inline void throw_missing(const std::string& kind, const std::string& msg) {
  throw Error(Status::missing_artifact, kind, msg);
}
[[noreturn]] inline void throw_runtime(const std::string& kind, const std::string& msg) {
  throw Error(Status::runtime_error, kind, msg);
}

// FNV-1a, used for cache keys, stage hashes and the hashed encoder vocabulary.
constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

inline uint64_t fnv1a64(std::string_view data, uint64_t seed = kFnvOffset) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline uint64_t fnv1a64_bytes(const void* data, size_t n, uint64_t seed = kFnvOffset) {
  return fnv1a64(std::string_view(static_cast<const char*>(data), n), seed);
}

std::string to_hex(uint64_t value);

// splitmix64; used to derive independent per-stage / per-component seeds
// from one root seed.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t root, std::string_view tag) {
  return splitmix64(root ^ fnv1a64(tag));
}

using Rng = std::mt19937_64;

}  // namespace shorttopic
