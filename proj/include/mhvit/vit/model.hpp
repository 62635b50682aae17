#pragma once

#include <functional>
#include <string>

#include "mhvit/vit/tensor.hpp"

namespace mhvit {

struct ViTConfig {
  int image_size = 32;
  int channels = 1;
  int patch_size = 8;
  int embed_dim = 32;   // D
  int num_layers = 2;   // L
  int num_heads = 4;    // h
  int head_dim = 8;     // d_k
  int mlp_hidden = 64;
  double dropout = 0.1;
  int num_classes = 3;  // AD=0, MCI=1, HC=2

  void validate() const {
    if (image_size <= 0 || channels <= 0 || patch_size <= 0 || embed_dim <= 0 ||
        num_layers <= 0 || num_heads <= 0 || head_dim <= 0 || mlp_hidden <= 0 ||
        num_classes <= 0)
      throw ConfigError("ViT config fields must be positive");
    if (image_size % patch_size != 0)
      throw ConfigError("image_size must be divisible by patch_size");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
  }

  int num_patches() const { return (image_size / patch_size) * (image_size / patch_size); }
  int seq_len() const { return num_patches() + 1; }
  int patch_len() const { return patch_size * patch_size * channels; }
  int attn_width() const { return num_heads * head_dim; }

  // Paper-scale architecture: 224px input, 16px patches, 8 heads of dim 64.
  static ViTConfig paper_scale() {
    ViTConfig c;
    c.image_size = 224;
    c.patch_size = 16;
    c.embed_dim = 64;
    c.num_layers = 4;
    c.num_heads = 8;
    c.head_dim = 64;
    c.mlp_hidden = 128;
    return c;
  }

  // Default desk-scale architecture used for campaigns and training tests.
  static ViTConfig desk_scale() { return ViTConfig{}; }

  // Minimal configuration for finite-difference gradient checks.
  static ViTConfig tiny() {
    ViTConfig c;
    c.image_size = 8;
    c.patch_size = 4;
    c.embed_dim = 8;
    c.num_layers = 1;
    c.num_heads = 2;
    c.head_dim = 4;
    c.mlp_hidden = 16;
    c.dropout = 0.0;
    return c;
  }
};

struct EncoderLayerParams {
  Tensor ln1_gamma, ln1_beta;
  Tensor wq, bq, wk, bk, wv, bv;  // (D, h*dk) / (h*dk)
  Tensor wo, bo;                  // (h*dk, D) / (D)
  Tensor ln2_gamma, ln2_beta;
  Tensor w1, b1;  // (D, mlp_hidden) / (mlp_hidden)
  Tensor w2, b2;  // (mlp_hidden, D) / (D)
};

struct ViTModel {
  ViTConfig cfg;
  Tensor patch_w, patch_b;  // (patch_len, D) / (D)
  Tensor cls_token;         // (1, D)
  Tensor pos_emb;           // (N+1, D)
  std::vector<EncoderLayerParams> layers;
  Tensor lnf_gamma, lnf_beta;  // final LN
  Tensor head_w, head_b;       // (D, classes) / (classes)

  explicit ViTModel(const ViTConfig& config) : cfg(config) {
    cfg.validate();
    const int d = cfg.embed_dim, aw = cfg.attn_width();
    patch_w = Tensor({cfg.patch_len(), d});
    patch_b = Tensor({d});
    cls_token = Tensor({1, d});
    pos_emb = Tensor({cfg.seq_len(), d});
    layers.resize(cfg.num_layers);
    for (auto& l : layers) {
      l.ln1_gamma = Tensor({d});
      l.ln1_beta = Tensor({d});
      l.wq = Tensor({d, aw}); l.bq = Tensor({aw});
      l.wk = Tensor({d, aw}); l.bk = Tensor({aw});
      l.wv = Tensor({d, aw}); l.bv = Tensor({aw});
      l.wo = Tensor({aw, d}); l.bo = Tensor({d});
      l.ln2_gamma = Tensor({d});
      l.ln2_beta = Tensor({d});
      l.w1 = Tensor({d, cfg.mlp_hidden}); l.b1 = Tensor({cfg.mlp_hidden});
      l.w2 = Tensor({cfg.mlp_hidden, d}); l.b2 = Tensor({d});
    }
    lnf_gamma = Tensor({d});
    lnf_beta = Tensor({d});
    head_w = Tensor({d, cfg.num_classes});
    head_b = Tensor({cfg.num_classes});
    for (auto& l : layers) {
      l.ln1_gamma.fill(1.0);
      l.ln2_gamma.fill(1.0);
    }
    lnf_gamma.fill(1.0);
  }

  // Truncated-normal(0.02) projections and embeddings; biases zero; LN
  // scale one, offset zero.
  void init(std::uint64_t seed) {
    Rng rng(seed);
    init_trunc_normal(patch_w, 0.02, rng);
    init_trunc_normal(cls_token, 0.02, rng);
    init_trunc_normal(pos_emb, 0.02, rng);
    for (auto& l : layers) {
      init_trunc_normal(l.wq, 0.02, rng);
      init_trunc_normal(l.wk, 0.02, rng);
      init_trunc_normal(l.wv, 0.02, rng);
      init_trunc_normal(l.wo, 0.02, rng);
      init_trunc_normal(l.w1, 0.02, rng);
      init_trunc_normal(l.w2, 0.02, rng);
    }
    init_trunc_normal(head_w, 0.02, rng);
  }

  ViTModel zeros_like() const {
    ViTModel z(cfg);
    z.for_each_param([](const std::string&, Tensor& t) { t.fill(0.0); });
    return z;
  }

  // Visits every parameter tensor in a fixed, documented order. This order
  // is the checkpoint serialization order and must not change between
  // format versions.
  void for_each_param(const std::function<void(const std::string&, Tensor&)>& fn) {
    fn("patch_w", patch_w);
    fn("patch_b", patch_b);
    fn("cls_token", cls_token);
    fn("pos_emb", pos_emb);
    for (std::size_t i = 0; i < layers.size(); ++i) {
      auto& l = layers[i];
      const std::string p = "layer" + std::to_string(i) + ".";
      fn(p + "ln1_gamma", l.ln1_gamma);
      fn(p + "ln1_beta", l.ln1_beta);
      fn(p + "wq", l.wq); fn(p + "bq", l.bq);
      fn(p + "wk", l.wk); fn(p + "bk", l.bk);
      fn(p + "wv", l.wv); fn(p + "bv", l.bv);
      fn(p + "wo", l.wo); fn(p + "bo", l.bo);
      fn(p + "ln2_gamma", l.ln2_gamma);
      fn(p + "ln2_beta", l.ln2_beta);
      fn(p + "w1", l.w1); fn(p + "b1", l.b1);
      fn(p + "w2", l.w2); fn(p + "b2", l.b2);
    }
    fn("lnf_gamma", lnf_gamma);
    fn("lnf_beta", lnf_beta);
    fn("head_w", head_w);
    fn("head_b", head_b);
  }

  void for_each_param(const std::function<void(const std::string&, const Tensor&)>& fn) const {
    const_cast<ViTModel*>(this)->for_each_param(
        [&](const std::string& name, Tensor& t) { fn(name, t); });
  }
};

}  // namespace mhvit
