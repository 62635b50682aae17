#include "doctest.h"
#include "mhvit/vit/forward.hpp"

using namespace mhvit;

TEST_CASE("relu") {
  Tensor x({1, 2});
  x.data = {-1.0, 2.0};
  Tensor y = relu(x);
  CHECK(y.data == std::vector<double>{0.0, 2.0});
  CHECK(relu(y).data == y.data);  // idempotent
  Rng rng(1);
  Tensor r({3, 5});
  for (double& v : r.data) v = gaussian(rng, 0.0, 2.0);
  for (double v : relu(r).data) CHECK(v >= 0.0);
}

TEST_CASE("softmax") {
  auto u = softmax(std::vector<double>{0.0, 0.0, 0.0});
  for (double v : u) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  auto a = softmax(std::vector<double>{0.3, -1.2, 2.4});
  auto b = softmax(std::vector<double>{0.3 + 7.0, -1.2 + 7.0, 2.4 + 7.0});
  for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

  auto big = softmax(std::vector<double>{1000.0, 0.0, 0.0});
  CHECK(big[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(big[1] == doctest::Approx(0.0).epsilon(1e-12));
  double sum = 0.0;
  for (double v : big) {
    CHECK(std::isfinite(v));
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("layer norm") {
  Tensor gamma({3}), beta({3});
  gamma.fill(1.0);
  SUBCASE("constant row maps to zero") {
    Tensor x({1, 3});
    x.data = {2.0, 2.0, 2.0};
    for (double v : layer_norm(x, gamma, beta).data) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("standardizes rows") {
    Tensor x({1, 3});
    x.data = {1.0, 5.0, -2.0};
    Tensor y = layer_norm(x, gamma, beta);
    double mean = 0.0, var = 0.0;
    for (double v : y.data) mean += v;
    mean /= 3;
    for (double v : y.data) var += (v - mean) * (v - mean);
    var /= 3;
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));  // eps shrinks it slightly
  }
  SUBCASE("shift invariance") {
    Tensor x({2, 3});
    x.data = {0.4, -1.0, 2.2, 3.0, 0.0, -0.5};
    Tensor shifted = x;
    for (double& v : shifted.data) v += 13.7;
    Tensor a = layer_norm(x, gamma, beta), b = layer_norm(shifted, gamma, beta);
    for (std::size_t i = 0; i < a.data.size(); ++i)
      CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-9));
  }
}

TEST_CASE("dropout expectation matches the identity under inverted scaling") {
  Rng rng(31);
  const double rate = 0.5;
  const int n_masks = 10000;
  Tensor x({1, 8});
  for (int j = 0; j < 8; ++j) x.data[j] = 0.5 + 0.1 * j;
  std::vector<double> mean(8, 0.0);
  for (int t = 0; t < n_masks; ++t) {
    Tensor m = dropout_mask(x.shape, rate, rng);
    Tensor y = apply_mask(x, m);
    for (int j = 0; j < 8; ++j) mean[j] += y.data[j];
  }
  for (int j = 0; j < 8; ++j) {
    mean[j] /= n_masks;
    // kept value is x/(1-rate) with prob (1-rate): std = x * sqrt(rate/(1-rate))
    const double se = x.data[j] * std::sqrt(rate / (1.0 - rate)) / std::sqrt(n_masks);
    CHECK(std::abs(mean[j] - x.data[j]) < 3.0 * se);
  }
}

TEST_CASE("extract_patches") {
  SUBCASE("4x4 image with 2x2 patches") {
    Tensor img({4, 4, 1});
    for (int i = 0; i < 16; ++i) img.data[i] = i;
    Tensor p = extract_patches(img, 2);
    CHECK(p.shape == std::vector<int>{4, 4});
    CHECK(p(0, 0) == 0);
    CHECK(p(0, 1) == 1);
    CHECK(p(0, 2) == 4);
    CHECK(p(0, 3) == 5);
    CHECK(p(3, 0) == 10);
    double img_sum = 0.0, patch_sum = 0.0;
    for (double v : img.data) img_sum += v;
    for (double v : p.data) patch_sum += v;
    CHECK(img_sum == patch_sum);
  }
  SUBCASE("paper-scale shape") {
    Tensor img({224, 224, 1});
    Tensor p = extract_patches(img, 16);
    CHECK(p.shape == std::vector<int>{196, 256});
  }
  SUBCASE("indivisible size") {
    Tensor img({5, 5, 1});
    CHECK_THROWS_AS(extract_patches(img, 2), ConfigError);
  }
}

TEST_CASE("embed") {
  ViTConfig cfg = ViTConfig::tiny();
  ViTModel m(cfg);
  SUBCASE("zero input reduces to the positional embedding") {
    Rng rng(2);
    init_trunc_normal(m.pos_emb, 0.02, rng);
    Tensor patches({cfg.num_patches(), cfg.patch_len()});
    Tensor z0 = embed(patches, m);
    CHECK(z0.shape == std::vector<int>{cfg.seq_len(), cfg.embed_dim});
    CHECK(z0.data == m.pos_emb.data);
  }
  SUBCASE("patch projection is linear") {
    m.init(7);
    Tensor patches({cfg.num_patches(), cfg.patch_len()});
    Rng rng(3);
    for (double& v : patches.data) v = uniform01(rng);
    Tensor doubled = patches;
    for (double& v : doubled.data) v *= 2.0;
    Tensor z1 = embed(patches, m), z2 = embed(doubled, m);
    // pre-pos projected row: z - pos - bias scales linearly
    for (int i = 1; i < cfg.seq_len(); ++i)
      for (int j = 0; j < cfg.embed_dim; ++j) {
        const double r1 = z1(i, j) - m.pos_emb(i, j) - m.patch_b[j];
        const double r2 = z2(i, j) - m.pos_emb(i, j) - m.patch_b[j];
        CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-9));
      }
  }
  SUBCASE("patch count mismatch") {
    Tensor patches({3, cfg.patch_len()});
    CHECK_THROWS_AS(embed(patches, m), std::invalid_argument);
  }
}

TEST_CASE("attention weights are row-stochastic; single token attends to itself") {
  ViTConfig cfg = ViTConfig::tiny();
  ViTModel m(cfg);
  m.init(11);
  Tensor z({cfg.seq_len(), cfg.embed_dim});
  Rng rng(4);
  for (double& v : z.data) v = gaussian(rng, 0.0, 1.0);
  MsaCache cache;
  multi_head_self_attention(z, m.layers[0], cfg, false, nullptr, &cache);
  for (const Tensor& attn : cache.attn)
    for (int i = 0; i < attn.shape[0]; ++i) {
      double sum = 0.0;
      for (int j = 0; j < attn.shape[1]; ++j) sum += attn(i, j);
      CHECK(std::abs(sum - 1.0) < 1e-6);
    }

  Tensor one({1, cfg.embed_dim});
  for (double& v : one.data) v = gaussian(rng, 0.0, 1.0);
  MsaCache c1;
  multi_head_self_attention(one, m.layers[0], cfg, false, nullptr, &c1);
  for (const Tensor& attn : c1.attn) {
    REQUIRE(attn.size() == 1);
    CHECK(attn.data[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tiny attention matches an independent hand computation") {
  // S=2, D=2, one head, d_k=2, fixed weights; oracle evaluates
  // softmax(Q K^T / sqrt(2)) V Wo + bo with straight-line arithmetic.
  ViTConfig cfg;
  cfg.image_size = 2;
  cfg.patch_size = 2;
  cfg.embed_dim = 2;
  cfg.num_layers = 1;
  cfg.num_heads = 1;
  cfg.head_dim = 2;
  cfg.mlp_hidden = 2;
  cfg.dropout = 0.0;
  ViTModel m(cfg);
  EncoderLayerParams& l = m.layers[0];
  l.wq.data = {0.3, -0.1, 0.2, 0.5};
  l.bq.data = {0.01, -0.02};
  l.wk.data = {-0.4, 0.6, 0.1, 0.2};
  l.bk.data = {0.0, 0.05};
  l.wv.data = {0.7, 0.1, -0.3, 0.4};
  l.bv.data = {0.02, 0.0};
  l.wo.data = {0.5, -0.2, 0.3, 0.8};
  l.bo.data = {0.1, -0.1};

  Tensor z({2, 2});
  z.data = {0.6, -0.3, 0.2, 0.9};

  // independent oracle
  auto mat2 = [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return std::array<double, 4>{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                                 a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
  };
  std::array<double, 4> zz{z.data[0], z.data[1], z.data[2], z.data[3]};
  std::array<double, 4> q = mat2(zz, {0.3, -0.1, 0.2, 0.5});
  std::array<double, 4> k = mat2(zz, {-0.4, 0.6, 0.1, 0.2});
  std::array<double, 4> v = mat2(zz, {0.7, 0.1, -0.3, 0.4});
  for (int i = 0; i < 2; ++i) {
    q[2 * i] += 0.01; q[2 * i + 1] += -0.02;
    k[2 * i + 1] += 0.05;
    v[2 * i] += 0.02;
  }
  const double inv = 1.0 / std::sqrt(2.0);
  std::array<double, 4> scores{
      (q[0] * k[0] + q[1] * k[1]) * inv, (q[0] * k[2] + q[1] * k[3]) * inv,
      (q[2] * k[0] + q[3] * k[1]) * inv, (q[2] * k[2] + q[3] * k[3]) * inv};
  std::array<double, 4> attn;
  for (int i = 0; i < 2; ++i) {
    const double mx = std::max(scores[2 * i], scores[2 * i + 1]);
    const double e0 = std::exp(scores[2 * i] - mx), e1 = std::exp(scores[2 * i + 1] - mx);
    attn[2 * i] = e0 / (e0 + e1);
    attn[2 * i + 1] = e1 / (e0 + e1);
  }
  std::array<double, 4> heads = mat2(attn, v);
  std::array<double, 4> expected = mat2(heads, {0.5, -0.2, 0.3, 0.8});
  for (int i = 0; i < 2; ++i) {
    expected[2 * i] += 0.1;
    expected[2 * i + 1] += -0.1;
  }

  Tensor out = multi_head_self_attention(z, l, cfg);
  for (int i = 0; i < 4; ++i) CHECK(out.data[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("zero-weight encoder stack is the identity on Z0") {
  ViTConfig cfg = ViTConfig::tiny();
  cfg.num_layers = 3;
  ViTModel m(cfg);  // all sub-layer weights start at zero, LN scale 1
  // zero the LN scales inside the residual branches so the branches vanish
  for (auto& l : m.layers) {
    l.ln1_gamma.fill(0.0);
    l.ln2_gamma.fill(0.0);
  }
  Tensor z({cfg.seq_len(), cfg.embed_dim});
  Rng rng(6);
  for (double& v : z.data) v = gaussian(rng, 0.0, 1.0);
  Tensor out = z;
  for (const auto& l : m.layers) out = encoder_block(out, l, cfg);
  for (std::size_t i = 0; i < z.data.size(); ++i)
    CHECK(out.data[i] == doctest::Approx(z.data[i]).epsilon(1e-12));
}

TEST_CASE("encoder block preserves shape and is deterministic in eval mode") {
  ViTConfig cfg = ViTConfig::tiny();
  ViTModel m(cfg);
  m.init(9);
  Tensor z({cfg.seq_len(), cfg.embed_dim});
  Rng rng(8);
  for (double& v : z.data) v = gaussian(rng, 0.0, 1.0);
  Tensor a = encoder_block(z, m.layers[0], cfg);
  CHECK(a.shape == z.shape);
  Tensor b = encoder_block(z, m.layers[0], cfg);
  CHECK(a.data == b.data);
}

TEST_CASE("forward shapes, permutation equivariance, softmax rows") {
  ViTConfig cfg = ViTConfig::tiny();
  ViTModel m(cfg);
  m.init(21);
  Rng rng(10);
  std::vector<Tensor> images;
  for (int i = 0; i < 4; ++i) {
    Tensor img({cfg.image_size, cfg.image_size, 1});
    for (double& v : img.data) v = uniform01(rng);
    images.push_back(std::move(img));
  }
  Tensor logits = forward(m, images);
  CHECK(logits.shape == std::vector<int>{4, 3});
  for (int i = 0; i < 4; ++i) {
    auto p = softmax(std::span<const double>(&logits.data[i * 3], 3));
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-6);
  }

  std::vector<Tensor> permuted{images[2], images[0], images[3], images[1]};
  Tensor plogits = forward(m, permuted);
  const int perm[4] = {2, 0, 3, 1};
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 3; ++c) CHECK(plogits(i, c) == logits(perm[i], c));
}

TEST_CASE("sparse categorical accuracy") {
  Tensor logits({3, 3});
  logits.data = {5, 0, 0, 0, 5, 0, 5, 0, 0};
  std::vector<int> labels{0, 1, 2};
  CHECK(sparse_categorical_accuracy(logits, labels) == doctest::Approx(2.0 / 3.0));
  std::vector<int> all{0, 1, 0};
  CHECK(sparse_categorical_accuracy(logits, all) == 1.0);
  Tensor shifted = logits;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) shifted(i, c) += 11.0;
  CHECK(sparse_categorical_accuracy(shifted, labels) ==
        sparse_categorical_accuracy(logits, labels));
  // ties break toward the lowest class index
  Tensor tie({1, 3});
  tie.data = {1.0, 1.0, 1.0};
  std::vector<int> zero{0};
  CHECK(sparse_categorical_accuracy(tie, zero) == 1.0);
}
