#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace shorttopic {

// Named-array container: one little-endian binary blob plus a JSON sidecar
// declaring dtype/shape/offset per array. Row-major element order.
//
//   sidecar: { "arrays": { name: {"dtype": "f64|f32|i32",
//                                 "shape": [..], "offset": bytes } },
//              "meta": { ... } }
class TensorWriter {
 public:
  void add_f64(const std::string& name, const std::vector<int64_t>& shape,
               const double* data);
  void add_i32(const std::string& name, const std::vector<int64_t>& shape,
               const int32_t* data);
  void add_matrix(const std::string& name, const Eigen::MatrixXd& m);
  void add_vector(const std::string& name, const Eigen::VectorXd& v);

  nlohmann::json& meta() { return meta_; }

  // Writes <stem>.bin and <stem>.json.
  void write(const std::filesystem::path& stem) const;

 private:
  struct Entry {
    std::string dtype;
    std::vector<int64_t> shape;
    size_t offset = 0;
    size_t bytes = 0;
  };
  std::map<std::string, Entry> entries_;
  std::vector<char> blob_;
  nlohmann::json meta_ = nlohmann::json::object();

  void append(const std::string& name, const std::string& dtype,
              const std::vector<int64_t>& shape, const void* data,
              size_t elem_size);
};

class TensorReader {
 public:
  explicit TensorReader(const std::filesystem::path& stem);

  bool has(const std::string& name) const;
  std::vector<int64_t> shape(const std::string& name) const;
  std::vector<double> read_f64(const std::string& name) const;
  std::vector<int32_t> read_i32(const std::string& name) const;
  Eigen::MatrixXd read_matrix(const std::string& name) const;
  Eigen::VectorXd read_vector(const std::string& name) const;

  const nlohmann::json& meta() const { return meta_; }

 private:
  struct Entry {
    std::string dtype;
    std::vector<int64_t> shape;
    size_t offset = 0;
  };
  std::map<std::string, Entry> entries_;
  std::vector<char> blob_;
  nlohmann::json meta_;

  const Entry& entry(const std::string& name) const;
  static int64_t count_of(const std::vector<int64_t>& shape);
};

// Small JSON file helpers shared across modules.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Write-then-rename so concurrent writers never expose partial files.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace shorttopic
