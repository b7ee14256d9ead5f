#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace shorttopic::enc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct EncoderConfig {
  std::string base_model = "tiny-en-v1";
  int num_layers = 2;
  int num_heads = 2;
  int embed_dim = 32;
  int ffn_dim = 64;
  int hash_vocab = 2048;  // hashed-token embedding table size; id 0 reserved
  int max_seq_len = 512;
  bool sinusoidal_positions = true;
  int num_virtual_tokens = 20;
  bool prefix_reparam = true;  // bottleneck reparameterization during training
  int prefix_bottleneck = 64;

  int head_dim() const { return embed_dim / num_heads; }
};

// Fills layer sizes for a named base model ("tiny-en-v1", "small-en-v1");
// unknown names keep the explicit dimensions in `config`.
EncoderConfig resolve_base_model(const EncoderConfig& config);

struct LayerWeights {
  MatrixXd wq, wk, wv, wo;          // E x E
  VectorXd bq, bk, bv, bo;          // E
  VectorXd ln1_g, ln1_b, ln2_g, ln2_b;
  MatrixXd w1;                      // E x F
  VectorXd b1;                      // F
  MatrixXd w2;                      // F x E
  VectorXd b2;                      // E
};

// Trainable per-layer key/value prefixes; the only trainable encoder state.
// When `reparam` is set the materialized prefixes are a function of a small
// bottleneck network and must be refreshed via materialize() after updates.
struct PrefixParameters {
  std::string base_model_id;
  int num_virtual_tokens = 0;
  std::vector<MatrixXd> key_prefix;    // per layer, M x E
  std::vector<MatrixXd> value_prefix;  // per layer, M x E

  bool reparam = false;
  MatrixXd seed_emb;  // M x E
  MatrixXd w1;        // E x B
  VectorXd b1;        // B
  MatrixXd w2;        // B x (2*L*E)
  VectorXd b2;        // 2*L*E

  // Gaussian init (std 0.02), seeded.
  static PrefixParameters init(const EncoderConfig& config, uint64_t seed);

  // Recomputes key_prefix/value_prefix from the bottleneck (no-op when flat).
  void materialize(int num_layers, int embed_dim);

  // Drops the bottleneck, keeping the materialized prefixes trainable directly.
  PrefixParameters flattened() const;
};

struct PrefixGrads {
  std::vector<MatrixXd> d_key_prefix, d_value_prefix;
  MatrixXd d_seed_emb, d_w1, d_w2;
  VectorXd d_b1, d_b2;

  void init_like(const PrefixParameters& p);
  void set_zero();
  // Chains d_key/value_prefix into the bottleneck parameter grads.
  void backprop_reparam(const PrefixParameters& p);
};

struct LayerTrace {
  MatrixXd x_in, q, k_t, v_t;
  std::vector<MatrixXd> attn;  // per head, T x (M+T); rows sum to 1
  MatrixXd ctx, attn_out;
  MatrixXd res1, ln1_xhat, ln1_out;
  MatrixXd ffn_pre, ffn_act;
  MatrixXd res2, ln2_xhat, ln2_out;
  VectorXd ln1_istd, ln2_istd;
};

struct ForwardTrace {
  std::vector<int32_t> ids;
  MatrixXd x0;
  std::vector<LayerTrace> layers;
  int seq_len = 0;
};

class BaseEncoder {
 public:
  // Deterministic weights derived from config.base_model.
  explicit BaseEncoder(const EncoderConfig& config);
  BaseEncoder(const BaseEncoder&) = delete;
  BaseEncoder& operator=(const BaseEncoder&) = delete;

  static std::shared_ptr<BaseEncoder> create(const EncoderConfig& config) {
    return std::make_shared<BaseEncoder>(resolve_base_model(config));
  }

  const EncoderConfig& config() const { return config_; }

  // Hashed-token ids in [1, hash_vocab); empty text maps to the reserved
  // empty-sequence id 0. Truncates to max_seq_len and counts truncations.
  std::vector<int32_t> tokenize(const std::string& text) const;

  VectorXd encode_ids(const std::vector<int32_t>& ids, const PrefixParameters& prefix,
                      ForwardTrace* trace = nullptr) const;
  VectorXd encode_one(const std::string& text, const PrefixParameters& prefix,
                      ForwardTrace* trace = nullptr) const;
  std::vector<VectorXd> encode(const std::vector<std::string>& texts,
                               const PrefixParameters& prefix) const;

  // Accumulates prefix gradients for one document given d(loss)/d(embedding).
  void backward(const ForwardTrace& trace, const PrefixParameters& prefix,
                const VectorXd& d_embedding, PrefixGrads& grads) const;

  uint64_t weights_checksum() const;
  int64_t truncation_count() const { return truncations_.load(); }

  const std::vector<LayerWeights>& layers() const { return layers_; }

 private:
  EncoderConfig config_;
  MatrixXd embedding_;  // hash_vocab x E
  std::vector<LayerWeights> layers_;
  mutable std::atomic<int64_t> truncations_{0};

  MatrixXd positional(int seq_len) const;
};

// Prefix artifact: tensor blob + JSON metadata (base model id, virtual
// tokens). Lossless f64 round trip.
void save_prefix(const PrefixParameters& prefix, const std::filesystem::path& stem);
PrefixParameters load_prefix(const std::filesystem::path& stem,
                             const std::optional<std::string>& expected_base_model =
                                 std::nullopt);

}  // namespace shorttopic::enc
