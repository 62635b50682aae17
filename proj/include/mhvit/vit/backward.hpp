#pragma once

#include "mhvit/vit/forward.hpp"

namespace mhvit {

namespace detail {

inline void add_colsum(const Tensor& d, Tensor& bias) {
  for (int i = 0; i < d.shape[0]; ++i)
    for (int j = 0; j < d.shape[1]; ++j) bias[j] += d(i, j);
}

// Backward through one encoder layer. dz is the gradient w.r.t. the layer
// output; returns the gradient w.r.t. the layer input.
inline Tensor encoder_block_backward(const Tensor& dz, const EncoderLayerParams& l,
                                     EncoderLayerParams& g, const EncoderLayerCache& c,
                                     const ViTConfig& cfg) {
  const int dk = cfg.head_dim, heads = cfg.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const bool dropped = c.m1_mask.size() > 0;

  // MLP branch: z_out = h2d + z_mid
  Tensor dz_mid = dz;
  Tensor dh2 = dropped ? apply_mask(dz, c.m2_mask) : dz;
  g.w2 += matmul_tn(c.h1d, dh2);
  add_colsum(dh2, g.b2);
  Tensor dh1d = matmul_nt(dh2, l.w2);
  Tensor dh1 = dropped ? apply_mask(dh1d, c.m1_mask) : dh1d;
  for (std::size_t i = 0; i < dh1.data.size(); ++i)
    if (c.h1.data[i] <= 0.0) dh1.data[i] = 0.0;
  g.w1 += matmul_tn(c.vln, dh1);
  add_colsum(dh1, g.b1);
  Tensor dvln = matmul_nt(dh1, l.w1);
  dz_mid += layer_norm_backward(dvln, c.ln2, l.ln2_gamma, g.ln2_gamma, g.ln2_beta);

  // Attention branch: z_mid = heads*Wo + bo + z_in
  Tensor dz_in = dz_mid;
  g.wo += matmul_tn(c.msa.heads, dz_mid);
  add_colsum(dz_mid, g.bo);
  Tensor dheads = matmul_nt(dz_mid, l.wo);

  const int s = dheads.shape[0];
  Tensor dq({s, heads * dk}), dkq({s, heads * dk}), dv({s, heads * dk});
  for (int h = 0; h < heads; ++h) {
    const bool masked = !c.msa.attn_mask.empty();
    const Tensor& attn = c.msa.attn[h];
    // head output H = A_used * V_h, A_used = mask(A)
    Tensor dattn_used({s, s});
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        double acc = 0.0;
        for (int p = 0; p < dk; ++p) acc += dheads(i, h * dk + p) * c.msa.v(j, h * dk + p);
        dattn_used(i, j) = acc;
      }
    for (int j = 0; j < s; ++j)
      for (int p = 0; p < dk; ++p) {
        double acc = 0.0;
        for (int i = 0; i < s; ++i) {
          double a = attn(i, j);
          if (masked) a *= c.msa.attn_mask[h](i, j);
          acc += a * dheads(i, h * dk + p);
        }
        dv(j, h * dk + p) += acc;
      }
    Tensor dattn = masked ? apply_mask(dattn_used, c.msa.attn_mask[h]) : dattn_used;
    // softmax rows: dS = A o (dA - sum_j dA o A)
    Tensor dscores({s, s});
    for (int i = 0; i < s; ++i) {
      double dot = 0.0;
      for (int j = 0; j < s; ++j) dot += dattn(i, j) * attn(i, j);
      for (int j = 0; j < s; ++j) dscores(i, j) = attn(i, j) * (dattn(i, j) - dot);
    }
    for (int i = 0; i < s; ++i)
      for (int p = 0; p < dk; ++p) {
        double acc_q = 0.0;
        for (int j = 0; j < s; ++j) acc_q += dscores(i, j) * c.msa.k(j, h * dk + p);
        dq(i, h * dk + p) += acc_q * scale;
      }
    for (int j = 0; j < s; ++j)
      for (int p = 0; p < dk; ++p) {
        double acc_k = 0.0;
        for (int i = 0; i < s; ++i) acc_k += dscores(i, j) * c.msa.q(i, h * dk + p);
        dkq(j, h * dk + p) += acc_k * scale;
      }
  }

  g.wq += matmul_tn(c.u, dq);
  add_colsum(dq, g.bq);
  g.wk += matmul_tn(c.u, dkq);
  add_colsum(dkq, g.bk);
  g.wv += matmul_tn(c.u, dv);
  add_colsum(dv, g.bv);
  Tensor du = matmul_nt(dq, l.wq);
  du += matmul_nt(dkq, l.wk);
  du += matmul_nt(dv, l.wv);
  dz_in += layer_norm_backward(du, c.ln1, l.ln1_gamma, g.ln1_gamma, g.ln1_beta);
  return dz_in;
}

}  // namespace detail

// Accumulates the gradient of one sample's loss into grads, given the
// cached forward pass and the gradient w.r.t. this sample's logits.
inline void backward_sample(const ViTModel& m, const SampleCache& cache,
                            std::span<const double> dlogits, ViTModel& grads) {
  const int d = m.cfg.embed_dim, classes = m.cfg.num_classes;
  // head: logits = y * head_w + head_b
  Tensor dy({1, d});
  for (int c = 0; c < classes; ++c) {
    grads.head_b[c] += dlogits[c];
    for (int j = 0; j < d; ++j) {
      grads.head_w(j, c) += cache.y(0, j) * dlogits[c];
      dy(0, j) += m.head_w(j, c) * dlogits[c];
    }
  }
  Tensor dcls = layer_norm_backward(dy, cache.lnf, m.lnf_gamma, grads.lnf_gamma, grads.lnf_beta);

  Tensor dz({m.cfg.seq_len(), d});
  for (int j = 0; j < d; ++j) dz(0, j) = dcls(0, j);

  for (int l = m.cfg.num_layers - 1; l >= 0; --l)
    dz = detail::encoder_block_backward(dz, m.layers[l], grads.layers[l], cache.layers[l], m.cfg);

  // embedding: z0 row 0 = cls + pos0; rows 1..N = patches*W + b + pos
  grads.pos_emb += dz;
  for (int j = 0; j < d; ++j) grads.cls_token(0, j) += dz(0, j);
  const int n = m.cfg.num_patches();
  Tensor dproj({n, d});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) dproj(i, j) = dz(i + 1, j);
  grads.patch_w += matmul_tn(cache.patches, dproj);
  detail::add_colsum(dproj, grads.patch_b);
}

// Convenience wrapper: forward + loss + full backward over a batch.
// Returns (loss, gradients). Dropout masks (train mode) come from rng.
inline std::pair<double, ViTModel> backward(const ViTModel& m, const std::vector<Tensor>& images,
                                            std::span<const int> labels, bool training = false,
                                            Rng* rng = nullptr) {
  std::vector<SampleCache> caches;
  Tensor logits = forward(m, images, training, rng, &caches);
  auto [loss, dlogits] = cross_entropy_loss(logits, labels);
  ViTModel grads = m.zeros_like();
  const int classes = m.cfg.num_classes;
  for (std::size_t i = 0; i < images.size(); ++i)
    backward_sample(m, caches[i],
                    std::span<const double>(&dlogits.data[i * classes], classes), grads);
  return {loss, std::move(grads)};
}

}  // namespace mhvit
