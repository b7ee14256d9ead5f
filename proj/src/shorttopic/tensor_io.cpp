#include "shorttopic/tensor_io.hpp"

#include <unistd.h>

#include <atomic>
#include <cstring>
#include <fstream>

#include "shorttopic/common.hpp"

namespace shorttopic {

namespace fs = std::filesystem;

static_assert(sizeof(double) == 8 && sizeof(int32_t) == 4);

namespace {

void ensure_little_endian() {
  const uint32_t probe = 1;
  if (reinterpret_cast<const unsigned char*>(&probe)[0] != 1) {
    throw_runtime("UnsupportedPlatform", "tensor files require a little-endian host");
  }
}

}  // namespace

void TensorWriter::append(const std::string& name, const std::string& dtype,
                          const std::vector<int64_t>& shape, const void* data,
                          size_t elem_size) {
  ensure_little_endian();
  int64_t count = 1;
  for (int64_t d : shape) count *= d;
  Entry e;
  e.dtype = dtype;
  e.shape = shape;
  e.offset = blob_.size();
  e.bytes = static_cast<size_t>(count) * elem_size;
  blob_.resize(e.offset + e.bytes);
  if (e.bytes > 0) std::memcpy(blob_.data() + e.offset, data, e.bytes);
  entries_[name] = std::move(e);
}

void TensorWriter::add_f64(const std::string& name, const std::vector<int64_t>& shape,
                           const double* data) {
  append(name, "f64", shape, data, sizeof(double));
}

void TensorWriter::add_i32(const std::string& name, const std::vector<int64_t>& shape,
                           const int32_t* data) {
  append(name, "i32", shape, data, sizeof(int32_t));
}

void TensorWriter::add_matrix(const std::string& name, const Eigen::MatrixXd& m) {
  // row-major on disk
  std::vector<double> buf(static_cast<size_t>(m.rows() * m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      buf[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
  add_f64(name, {m.rows(), m.cols()}, buf.data());
}

void TensorWriter::add_vector(const std::string& name, const Eigen::VectorXd& v) {
  add_f64(name, {v.size()}, v.data());
}

void TensorWriter::write(const fs::path& stem) const {
  nlohmann::json sidecar;
  sidecar["format"] = "shorttopic-tensors-v1";
  sidecar["byte_order"] = "little";
  sidecar["order"] = "row_major";
  nlohmann::json arrays = nlohmann::json::object();
  for (const auto& [name, e] : entries_) {
    arrays[name] = {{"dtype", e.dtype}, {"shape", e.shape}, {"offset", e.offset}};
  }
  sidecar["arrays"] = arrays;
  sidecar["meta"] = meta_;

  fs::path bin = stem;
  bin += ".bin";
  fs::path json = stem;
  json += ".json";
  atomic_write_file(bin, std::string(blob_.data(), blob_.size()));
  atomic_write_file(json, sidecar.dump(2) + "\n");
}

TensorReader::TensorReader(const fs::path& stem) {
  ensure_little_endian();
  fs::path bin = stem;
  bin += ".bin";
  fs::path json = stem;
  json += ".json";
  if (!fs::exists(bin) || !fs::exists(json)) {
    throw_missing("MissingArtifact", "tensor file not found: " + stem.string());
  }
  nlohmann::json sidecar = read_json_file(json);
  if (!sidecar.contains("arrays")) {
    throw_runtime("CorruptArtifact", "tensor sidecar missing 'arrays': " + json.string());
  }
  meta_ = sidecar.value("meta", nlohmann::json::object());
  for (auto it = sidecar["arrays"].begin(); it != sidecar["arrays"].end(); ++it) {
    Entry e;
    e.dtype = it.value().at("dtype").get<std::string>();
    e.shape = it.value().at("shape").get<std::vector<int64_t>>();
    e.offset = it.value().at("offset").get<size_t>();
    entries_[it.key()] = std::move(e);
  }

  std::ifstream in(bin, std::ios::binary);
  in.seekg(0, std::ios::end);
  blob_.resize(static_cast<size_t>(in.tellg()));
  in.seekg(0);
  in.read(blob_.data(), static_cast<std::streamsize>(blob_.size()));
  if (!in) throw_runtime("CorruptArtifact", "failed reading " + bin.string());

  for (const auto& [name, e] : entries_) {
    size_t elem = e.dtype == "i32" ? 4 : (e.dtype == "f32" ? 4 : 8);
    size_t need = e.offset + static_cast<size_t>(count_of(e.shape)) * elem;
    if (need > blob_.size()) {
      throw_runtime("CorruptArtifact",
                    "tensor blob truncated: " + bin.string() + " (array '" + name + "')");
    }
  }
}

int64_t TensorReader::count_of(const std::vector<int64_t>& shape) {
  int64_t count = 1;
  for (int64_t d : shape) count *= d;
  return count;
}

const TensorReader::Entry& TensorReader::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw_runtime("CorruptArtifact", "tensor array missing: " + name);
  }
  return it->second;
}

bool TensorReader::has(const std::string& name) const { return entries_.count(name) > 0; }

std::vector<int64_t> TensorReader::shape(const std::string& name) const {
  return entry(name).shape;
}

std::vector<double> TensorReader::read_f64(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.dtype != "f64") throw_runtime("CorruptArtifact", "dtype mismatch for " + name);
  std::vector<double> out(static_cast<size_t>(count_of(e.shape)));
  std::memcpy(out.data(), blob_.data() + e.offset, out.size() * sizeof(double));
  return out;
}

std::vector<int32_t> TensorReader::read_i32(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.dtype != "i32") throw_runtime("CorruptArtifact", "dtype mismatch for " + name);
  std::vector<int32_t> out(static_cast<size_t>(count_of(e.shape)));
  std::memcpy(out.data(), blob_.data() + e.offset, out.size() * sizeof(int32_t));
  return out;
}

Eigen::MatrixXd TensorReader::read_matrix(const std::string& name) const {
  const Entry& e = entry(name);
  if (e.shape.size() != 2) throw_runtime("CorruptArtifact", "expected 2-d array: " + name);
  std::vector<double> buf = read_f64(name);
  Eigen::MatrixXd m(e.shape[0], e.shape[1]);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = buf[static_cast<size_t>(r * m.cols() + c)];
  return m;
}

Eigen::VectorXd TensorReader::read_vector(const std::string& name) const {
  std::vector<double> buf = read_f64(name);
  return Eigen::Map<const Eigen::VectorXd>(buf.data(), static_cast<Eigen::Index>(buf.size()));
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw_missing("MissingArtifact", "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw_runtime("CorruptArtifact", "invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  atomic_write_file(path, j.dump(2) + "\n");
}

void atomic_write_file(const fs::path& path, const std::string& content) {
  static std::atomic<uint64_t> counter{0};
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1, std::memory_order_relaxed));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_runtime("IoError", "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw_runtime("IoError", "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace shorttopic
