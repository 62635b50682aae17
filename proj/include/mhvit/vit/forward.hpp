#pragma once

#include "mhvit/vit/model.hpp"
#include "mhvit/vit/ops.hpp"

namespace mhvit {

// Splits an (H, W, C) image into N = (H/P)^2 non-overlapping patches in
// row-major patch order, each flattened in (row, column, channel) order.
inline Tensor extract_patches(const Tensor& image, int patch) {
  if (image.shape.size() != 3) throw std::invalid_argument("image must be (H, W, C)");
  const int h = image.shape[0], w = image.shape[1], c = image.shape[2];
  if (h != w) throw ConfigError("images must be square");
  if (h % patch != 0) throw ConfigError("image size not divisible by patch size");
  const int per_side = h / patch;
  const int n = per_side * per_side;
  Tensor out({n, patch * patch * c});
  for (int pr = 0; pr < per_side; ++pr)
    for (int pc = 0; pc < per_side; ++pc) {
      const int p = pr * per_side + pc;
      int idx = 0;
      for (int r = 0; r < patch; ++r)
        for (int col = 0; col < patch; ++col)
          for (int ch = 0; ch < c; ++ch)
            out(p, idx++) =
                image.data[(static_cast<std::size_t>(pr * patch + r) * w + pc * patch + col) * c + ch];
    }
  return out;
}

// Z0 = [cls; proj(patch_1); ...; proj(patch_N)] + pos
inline Tensor embed(const Tensor& patches, const ViTModel& m) {
  if (patches.shape[0] != m.cfg.num_patches())
    throw std::invalid_argument("patch count does not match model");
  const int d = m.cfg.embed_dim;
  Tensor proj = linear(patches, m.patch_w, m.patch_b);
  Tensor z0({m.cfg.seq_len(), d});
  for (int j = 0; j < d; ++j) z0(0, j) = m.cls_token(0, j) + m.pos_emb(0, j);
  for (int i = 0; i < patches.shape[0]; ++i)
    for (int j = 0; j < d; ++j) z0(i + 1, j) = proj(i, j) + m.pos_emb(i + 1, j);
  return z0;
}

struct MsaCache {
  Tensor q, k, v;                 // (S, h*dk)
  std::vector<Tensor> attn;       // per head, softmaxed (S, S)
  std::vector<Tensor> attn_mask;  // dropout masks, empty in eval mode
  Tensor heads;                   // concat of head outputs (S, h*dk)
};

// Scaled dot-product multi-head self-attention over an (S, D) sequence.
// Per head: softmax(Q K^T / sqrt(d_k)) V, heads concatenated and projected
// back to D. Dropout (train mode) is applied to the attention weights.
inline Tensor multi_head_self_attention(const Tensor& z, const EncoderLayerParams& l,
                                        const ViTConfig& cfg, bool training = false,
                                        Rng* rng = nullptr, MsaCache* cache = nullptr) {
  const int s = z.shape[0], dk = cfg.head_dim, heads = cfg.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Tensor q = linear(z, l.wq, l.bq);
  Tensor k = linear(z, l.wk, l.bk);
  Tensor v = linear(z, l.wv, l.bv);
  Tensor out_heads({s, heads * dk});
  if (cache) {
    cache->attn.clear();
    cache->attn_mask.clear();
  }
  for (int h = 0; h < heads; ++h) {
    Tensor scores({s, s});
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        double dot = 0.0;
        for (int p = 0; p < dk; ++p) dot += q(i, h * dk + p) * k(j, h * dk + p);
        scores(i, j) = dot * scale;
      }
    Tensor attn = softmax_rows(scores);
    Tensor attn_used = attn;
    if (training && cfg.dropout > 0.0) {
      Tensor mask = dropout_mask({s, s}, cfg.dropout, *rng);
      attn_used = apply_mask(attn, mask);
      if (cache) cache->attn_mask.push_back(std::move(mask));
    }
    for (int i = 0; i < s; ++i)
      for (int p = 0; p < dk; ++p) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += attn_used(i, j) * v(j, h * dk + p);
        out_heads(i, h * dk + p) = acc;
      }
    if (cache) cache->attn.push_back(std::move(attn));
  }
  if (cache) {
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->heads = out_heads;
  }
  return linear(out_heads, l.wo, l.bo);
}

struct EncoderLayerCache {
  Tensor z_in;  // Z_{l-1}
  LayerNormCache ln1;
  Tensor u;  // LN1 output
  MsaCache msa;
  Tensor z_mid;  // Z' = MSA(LN(Z)) + Z
  LayerNormCache ln2;
  Tensor vln;                    // LN2 output
  Tensor h1, h1r, h1d, h2, h2d;  // MLP intermediates
  Tensor m1_mask, m2_mask;       // dropout masks, unset in eval mode
};

// Pre-norm residual block: Z' = MSA(LN(Z)) + Z; Z_l = MLP(LN(Z')) + Z'.
// MLP is dense-ReLU-dense; dropout follows each MLP layer in train mode.
inline Tensor encoder_block(const Tensor& z_in, const EncoderLayerParams& l, const ViTConfig& cfg,
                            bool training = false, Rng* rng = nullptr,
                            EncoderLayerCache* cache = nullptr) {
  const bool drop = training && cfg.dropout > 0.0;
  LayerNormCache ln1, ln2;
  Tensor u = layer_norm(z_in, l.ln1_gamma, l.ln1_beta, 1e-5, cache ? &ln1 : nullptr);
  Tensor attn_out =
      multi_head_self_attention(u, l, cfg, training, rng, cache ? &cache->msa : nullptr);
  Tensor z_mid = attn_out;
  z_mid += z_in;

  Tensor vln = layer_norm(z_mid, l.ln2_gamma, l.ln2_beta, 1e-5, cache ? &ln2 : nullptr);
  Tensor h1 = linear(vln, l.w1, l.b1);
  Tensor h1r = relu(h1);
  Tensor h1d = h1r;
  Tensor m1_mask, m2_mask;
  if (drop) {
    m1_mask = dropout_mask(h1r.shape, cfg.dropout, *rng);
    h1d = apply_mask(h1r, m1_mask);
  }
  Tensor h2 = linear(h1d, l.w2, l.b2);
  Tensor h2d = h2;
  if (drop) {
    m2_mask = dropout_mask(h2.shape, cfg.dropout, *rng);
    h2d = apply_mask(h2, m2_mask);
  }
  Tensor z_out = h2d;
  z_out += z_mid;

  if (cache) {
    cache->z_in = z_in;
    cache->ln1 = std::move(ln1);
    cache->u = std::move(u);
    cache->z_mid = std::move(z_mid);
    cache->ln2 = std::move(ln2);
    cache->vln = std::move(vln);
    cache->h1 = std::move(h1);
    cache->h1r = std::move(h1r);
    cache->h1d = std::move(h1d);
    cache->h2 = std::move(h2);
    cache->h2d = std::move(h2d);
    cache->m1_mask = std::move(m1_mask);
    cache->m2_mask = std::move(m2_mask);
  }
  return z_out;
}

struct SampleCache {
  Tensor patches;
  std::vector<EncoderLayerCache> layers;
  Tensor cls_final;  // (1, D) class-token row of Z_L
  LayerNormCache lnf;
  Tensor y;  // (1, D) normalized class token
};

// Full forward pass for one image: patches -> embedding -> L encoder
// blocks -> final LN of the class token -> linear head. Returns raw logits;
// softmax lives in the loss.
inline std::vector<double> forward_sample(const ViTModel& m, const Tensor& image, bool training,
                                          Rng* rng = nullptr, SampleCache* cache = nullptr) {
  Tensor patches = extract_patches(image, m.cfg.patch_size);
  Tensor z = embed(patches, m);
  if (cache) {
    cache->patches = std::move(patches);
    cache->layers.resize(m.cfg.num_layers);
  }
  for (int l = 0; l < m.cfg.num_layers; ++l)
    z = encoder_block(z, m.layers[l], m.cfg, training, rng, cache ? &cache->layers[l] : nullptr);

  Tensor cls({1, m.cfg.embed_dim});
  for (int j = 0; j < m.cfg.embed_dim; ++j) cls(0, j) = z(0, j);
  LayerNormCache lnf;
  Tensor y = layer_norm(cls, m.lnf_gamma, m.lnf_beta, 1e-5, cache ? &lnf : nullptr);
  std::vector<double> logits(m.cfg.num_classes);
  for (int c = 0; c < m.cfg.num_classes; ++c) {
    double acc = m.head_b[c];
    for (int j = 0; j < m.cfg.embed_dim; ++j) acc += y(0, j) * m.head_w(j, c);
    logits[c] = acc;
  }
  if (cache) {
    cache->cls_final = std::move(cls);
    cache->lnf = std::move(lnf);
    cache->y = std::move(y);
  }
  return logits;
}

// Forward over a batch of images; logits row per image, class order
// (AD=0, MCI=1, HC=2).
inline Tensor forward(const ViTModel& m, const std::vector<Tensor>& images, bool training = false,
                      Rng* rng = nullptr, std::vector<SampleCache>* caches = nullptr) {
  Tensor logits({static_cast<int>(images.size()), m.cfg.num_classes});
  if (caches) caches->resize(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::vector<double> row =
        forward_sample(m, images[i], training, rng, caches ? &(*caches)[i] : nullptr);
    for (int c = 0; c < m.cfg.num_classes; ++c) logits(static_cast<int>(i), c) = row[c];
  }
  return logits;
}

}  // namespace mhvit
