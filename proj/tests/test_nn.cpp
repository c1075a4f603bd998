#include <catch2/catch_amalgamated.hpp>

#include "stylometer/nn.hpp"

#include <cmath>

#include "helpers.hpp"

using namespace stylo;
using namespace stylo::nn;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (double& v : t.data) v = uniform_real(rng, lo, hi);
    return t;
}

Tensor one_hot_labels(std::size_t batch, std::size_t classes, Rng& rng) {
    Tensor t({batch, classes});
    for (std::size_t b = 0; b < batch; ++b)
        t.data[b * classes + uniform_below(rng, classes)] = 1.0;
    return t;
}

double loss_with(const NetworkState& st, const Tensor& x, const Tensor& y, Mode mode,
                 std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    return loss_and_gradients(st, x, y, &rng, mode).loss;
}

/// Central finite differences over every parameter; the rng is re-seeded for
/// every evaluation so train-mode dropout masks are identical across the
/// perturbed passes.
double max_gradient_rel_error(const NetworkState& st, const Tensor& x, const Tensor& y, Mode mode,
                              std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    const LossResult res = loss_and_gradients(st, x, y, &rng, mode);
    const double h = 1e-5;
    double worst = 0.0;
    const auto probe = [&](const Tensor& grad, bool weight, std::size_t li) {
        for (std::size_t i = 0; i < grad.size(); ++i) {
            NetworkState plus = st;
            NetworkState minus = st;
            auto& pt = weight ? plus.weights[li] : plus.biases[li];
            auto& mt = weight ? minus.weights[li] : minus.biases[li];
            pt.data[i] += h;
            mt.data[i] -= h;
            const double fd =
                (loss_with(plus, x, y, mode, rng_seed) - loss_with(minus, x, y, mode, rng_seed)) /
                (2.0 * h);
            const double bp = grad.data[i];
            const double rel = std::abs(fd - bp) / std::max({1e-5, std::abs(fd), std::abs(bp)});
            worst = std::max(worst, rel);
        }
    };
    for (std::size_t li = 0; li < st.specs.size(); ++li) {
        if (st.weights[li].empty()) continue;
        probe(res.grads.dw[li], true, li);
        probe(res.grads.db[li], false, li);
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Architectures
// ---------------------------------------------------------------------------

TEST_CASE("unigram net matches the published layer table", "[nn]") {
    const auto specs = build_unigram_net();
    REQUIRE(specs.size() == 9);
    const int dense_dims[5][2] = {{11, 20}, {20, 18}, {18, 16}, {16, 15}, {15, 8}};
    const double rates[4] = {0.6, 0.5, 0.5, 0.5};
    for (int k = 0; k < 5; ++k) {
        const auto& d = specs[static_cast<std::size_t>(2 * k)];
        CHECK(d.kind == LayerKind::Dense);
        CHECK(d.in_dim == dense_dims[k][0]);
        CHECK(d.out_dim == dense_dims[k][1]);
        CHECK(d.activation == (k == 4 ? Activation::Softmax : Activation::Relu));
    }
    for (int k = 0; k < 4; ++k) {
        const auto& p = specs[static_cast<std::size_t>(2 * k + 1)];
        CHECK(p.kind == LayerKind::Dropout);
        CHECK(p.rate == rates[k]);
    }
    const auto shapes = infer_shapes(specs, {11});
    CHECK(shapes.back() == std::vector<std::size_t>{8});
}

TEST_CASE("bigram cnn matches the published dense tail and input shape", "[nn]") {
    const auto specs = build_bigram_cnn();
    REQUIRE(specs.size() == 14);
    CHECK(specs[0].kind == LayerKind::Conv2d);
    CHECK(specs[0].in_channels == 1);
    CHECK(specs[1].kind == LayerKind::MaxPool2d);
    CHECK(specs[2].kind == LayerKind::Conv2d);
    CHECK(specs[3].kind == LayerKind::MaxPool2d);
    CHECK(specs[4].kind == LayerKind::Flatten);

    const int tail_dims[5][2] = {{64, 30}, {30, 18}, {18, 16}, {16, 15}, {15, 8}};
    for (int k = 0; k < 5; ++k) {
        const auto& d = specs[static_cast<std::size_t>(5 + 2 * k)];
        CHECK(d.kind == LayerKind::Dense);
        CHECK(d.in_dim == tail_dims[k][0]);
        CHECK(d.out_dim == tail_dims[k][1]);
        CHECK(d.activation == (k == 4 ? Activation::Softmax : Activation::Relu));
        if (k < 4) {
            const auto& p = specs[static_cast<std::size_t>(5 + 2 * k + 1)];
            CHECK(p.kind == LayerKind::Dropout);
            CHECK(p.rate == 0.3);
        }
    }

    // 11 -> same conv 11 -> pool 5 -> same conv 5 -> pool 2; flatten 2*2*16 = 64
    const auto shapes = infer_shapes(specs, {1, 11, 11});
    CHECK(shapes[0] == std::vector<std::size_t>{8, 11, 11});
    CHECK(shapes[1] == std::vector<std::size_t>{8, 5, 5});
    CHECK(shapes[2] == std::vector<std::size_t>{16, 5, 5});
    CHECK(shapes[3] == std::vector<std::size_t>{16, 2, 2});
    CHECK(shapes[4] == std::vector<std::size_t>{64});
    CHECK(shapes.back() == std::vector<std::size_t>{8});
}

TEST_CASE("spec validation rejects bad compositions", "[nn]") {
    CHECK_THROWS_AS(infer_shapes({LayerSpec::dense(4, 3, Activation::Relu)}, {5}), ShapeMismatch);
    CHECK_THROWS_AS(infer_shapes({LayerSpec::dense(4, 3, Activation::Softmax),
                                  LayerSpec::dense(3, 2, Activation::Relu)},
                                 {4}),
                    ShapeMismatch);
    CHECK_THROWS_AS(infer_shapes({LayerSpec::dropout(1.0)}, {4}), ShapeMismatch);
    CHECK_THROWS_AS(infer_shapes({LayerSpec::conv2d(2, 4, 3, 3, Padding::Same, Activation::Relu)},
                                 {1, 5, 5}),
                    ShapeMismatch);
}

// ---------------------------------------------------------------------------
// Forward behavior
// ---------------------------------------------------------------------------

TEST_CASE("softmax outputs are valid distributions, even for extreme logits", "[nn]") {
    Rng rng(1);
    const auto st = init_network(build_unigram_net(), {11}, 42);
    const Tensor x = random_tensor({7, 11}, rng, 0.0, 1.0);
    const auto out = forward(st, x, Mode::Eval);
    for (std::size_t b = 0; b < 7; ++b) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 8; ++c) sum += out.probs.data[b * 8 + c];
        CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }

    NetworkState hot = init_network({LayerSpec::dense(2, 3, Activation::Softmax)}, {2}, 1);
    for (double& w : hot.weights[0].data) w = 1e4;
    hot.weights[0].data[0] = -1e4;
    Tensor big({1, 2});
    big.data = {50.0, -50.0};
    const auto res = forward(hot, big, Mode::Eval);
    double sum = 0.0;
    for (double p : res.probs.data) {
        CHECK(std::isfinite(p));
        sum += p;
    }
    CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("train-mode dropout keeps about 1-rate of the units", "[nn]") {
    const double rate = 0.4;
    const auto st = init_network({LayerSpec::dropout(rate)}, {10000}, 5);
    Tensor x({1, 10000});
    for (double& v : x.data) v = 1.0;
    Rng rng(88);
    const auto out = forward(st, x, Mode::Train, &rng);
    std::size_t kept = 0;
    for (double v : out.probs.data) {
        if (v != 0.0) {
            CHECK_THAT(v, Catch::Matchers::WithinAbs(1.0 / (1.0 - rate), 1e-12));
            ++kept;
        }
    }
    const double expected = 10000.0 * (1.0 - rate);
    const double sigma = std::sqrt(10000.0 * rate * (1.0 - rate));
    CHECK(std::abs(static_cast<double>(kept) - expected) <= 3.0 * sigma);
}

TEST_CASE("eval forward equals the dropout-free network exactly", "[nn]") {
    auto stripped_specs = build_unigram_net();
    std::erase_if(stripped_specs, [](const LayerSpec& s) { return s.kind == LayerKind::Dropout; });

    const auto full = init_network(build_unigram_net(), {11}, 31);
    const auto stripped = init_network(stripped_specs, {11}, 31);

    Rng rng(4);
    const Tensor x = random_tensor({5, 11}, rng, 0.0, 1.0);
    const auto a = forward(full, x, Mode::Eval);
    const auto b = forward(stripped, x, Mode::Eval);
    CHECK(a.probs.data == b.probs.data);  // bitwise
}

TEST_CASE("eval forward is deterministic", "[nn]") {
    Rng rng(10);
    const auto st = init_network(build_bigram_cnn(), {1, 11, 11}, 7);
    const Tensor x = random_tensor({3, 1, 11, 11}, rng, 0.0, 0.2);
    const auto a = forward(st, x, Mode::Eval);
    const auto b = forward(st, x, Mode::Eval);
    CHECK(a.probs.data == b.probs.data);
}

TEST_CASE("forward rejects mismatched batches", "[nn]") {
    const auto st = init_network(build_unigram_net(), {11}, 3);
    CHECK_THROWS_AS(forward(st, Tensor({2, 12}), Mode::Eval), ShapeMismatch);
    CHECK_THROWS_AS(forward(st, Tensor({2, 11, 1}), Mode::Eval), ShapeMismatch);
}

// ---------------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------------

TEST_CASE("cross entropy on known distributions", "[nn]") {
    Tensor probs({1, 8});
    Tensor labels({1, 8});
    labels.data[3] = 1.0;
    for (double& p : probs.data) p = 0.125;
    CHECK_THAT(cross_entropy(probs, labels), Catch::Matchers::WithinAbs(std::log(8.0), 1e-9));

    Tensor perfect({1, 8});
    perfect.data[3] = 1.0;
    CHECK(cross_entropy(perfect, labels) >= 0.0);
    CHECK(cross_entropy(perfect, labels) < 1e-11);  // clamp keeps it finite

    CHECK_THROWS_AS(cross_entropy(probs, Tensor({1, 7})), ShapeMismatch);
}

TEST_CASE("cross entropy is non-negative", "[nn]") {
    Rng rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        Tensor probs({4, 5});
        for (std::size_t b = 0; b < 4; ++b) {
            double sum = 0.0;
            for (std::size_t c = 0; c < 5; ++c) {
                probs.data[b * 5 + c] = uniform_real(rng, 1e-6, 1.0);
                sum += probs.data[b * 5 + c];
            }
            for (std::size_t c = 0; c < 5; ++c) probs.data[b * 5 + c] /= sum;
        }
        const Tensor labels = one_hot_labels(4, 5, rng);
        CHECK(cross_entropy(probs, labels) >= 0.0);
    }
}

// ---------------------------------------------------------------------------
// Gradient checks (central finite differences)
// ---------------------------------------------------------------------------

TEST_CASE("gradients: dense relu + softmax cross-entropy", "[nn][grad]") {
    const auto st = init_network(
        {LayerSpec::dense(5, 4, Activation::Relu), LayerSpec::dense(4, 3, Activation::Softmax)},
        {5}, 2027);
    Rng rng(3);
    const Tensor x = random_tensor({2, 5}, rng);
    const Tensor y = one_hot_labels(2, 3, rng);
    CHECK(max_gradient_rel_error(st, x, y, Mode::Eval, 0) < 1e-4);
}

TEST_CASE("gradients: conv2d same padding with maxpool", "[nn][grad]") {
    const auto st = init_network({LayerSpec::conv2d(1, 2, 3, 3, Padding::Same, Activation::Relu),
                                  LayerSpec::maxpool2d(2, 2, 2),
                                  LayerSpec::flatten(),
                                  LayerSpec::dense(8, 3, Activation::Softmax)},
                                 {1, 5, 5}, 11);
    Rng rng(9);
    const Tensor x = random_tensor({2, 1, 5, 5}, rng);
    const Tensor y = one_hot_labels(2, 3, rng);
    CHECK(max_gradient_rel_error(st, x, y, Mode::Eval, 0) < 1e-4);
}

TEST_CASE("gradients: conv2d valid padding", "[nn][grad]") {
    const auto st = init_network({LayerSpec::conv2d(2, 3, 2, 2, Padding::Valid, Activation::Relu),
                                  LayerSpec::flatten(),
                                  LayerSpec::dense(27, 4, Activation::Softmax)},
                                 {2, 4, 4}, 23);
    Rng rng(13);
    const Tensor x = random_tensor({3, 2, 4, 4}, rng);
    const Tensor y = one_hot_labels(3, 4, rng);
    CHECK(max_gradient_rel_error(st, x, y, Mode::Eval, 0) < 1e-4);
}

TEST_CASE("gradients: dropout as identity in eval mode", "[nn][grad]") {
    const auto st = init_network({LayerSpec::dense(6, 8, Activation::Relu), LayerSpec::dropout(0.5),
                                  LayerSpec::dense(8, 3, Activation::Softmax)},
                                 {6}, 5);
    Rng rng(21);
    const Tensor x = random_tensor({2, 6}, rng);
    const Tensor y = one_hot_labels(2, 3, rng);
    CHECK(max_gradient_rel_error(st, x, y, Mode::Eval, 0) < 1e-4);
}

TEST_CASE("gradients: dropout in train mode with a pinned mask", "[nn][grad]") {
    const auto st = init_network({LayerSpec::dense(6, 8, Activation::Relu), LayerSpec::dropout(0.4),
                                  LayerSpec::dense(8, 3, Activation::Softmax)},
                                 {6}, 6);
    Rng rng(22);
    const Tensor x = random_tensor({2, 6}, rng);
    const Tensor y = one_hot_labels(2, 3, rng);
    // every FD evaluation re-seeds the rng, so all passes share the mask
    CHECK(max_gradient_rel_error(st, x, y, Mode::Train, 777) < 1e-4);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

TEST_CASE("adam leaves parameters alone on zero gradients", "[nn]") {
    auto st = init_network({LayerSpec::dense(3, 2, Activation::Softmax)}, {3}, 9);
    const auto before = st.weights[0].data;
    Gradients grads;
    grads.dw.assign(1, Tensor(st.weights[0].shape));
    grads.db.assign(1, Tensor(st.biases[0].shape));
    adam_step(st, grads, {});
    CHECK(st.weights[0].data == before);
    CHECK(st.step == 1);
}

TEST_CASE("adam single-step matches the hand computation", "[nn]") {
    auto st = init_network({LayerSpec::dense(1, 1, Activation::None)}, {1}, 1);
    st.weights[0].data[0] = 0.25;
    TrainConfig cfg;  // lr 1e-3, beta1 0.9, beta2 0.999, eps 1e-8
    Gradients grads;
    grads.dw.assign(1, Tensor(st.weights[0].shape));
    grads.db.assign(1, Tensor(st.biases[0].shape));
    const double g = 0.3;
    grads.dw[0].data[0] = g;

    // m1 = 0.1 g, v1 = 1e-3 g^2; bias-corrected back to g and g^2, so the
    // first step is -lr * g / (|g| + eps).
    const double expected = 0.25 - cfg.learning_rate * g / (std::abs(g) + cfg.eps);
    adam_step(st, grads, cfg);
    CHECK_THAT(st.weights[0].data[0], Catch::Matchers::WithinAbs(expected, 1e-15));
    CHECK(st.biases[0].data[0] == 0.0);
}

TEST_CASE("adam is deterministic", "[nn]") {
    auto a = init_network(build_unigram_net(), {11}, 77);
    auto b = a;
    Rng rng(2);
    const Tensor x = random_tensor({4, 11}, rng, 0.0, 1.0);
    const Tensor y = one_hot_labels(4, 8, rng);
    Rng r1(5), r2(5);
    const auto ga = loss_and_gradients(a, x, y, &r1);
    const auto gb = loss_and_gradients(b, x, y, &r2);
    adam_step(a, ga.grads, {});
    adam_step(b, gb.grads, {});
    for (std::size_t li = 0; li < a.weights.size(); ++li) {
        CHECK(a.weights[li].data == b.weights[li].data);
        CHECK(a.m_w[li].data == b.m_w[li].data);
        CHECK(a.v_w[li].data == b.v_w[li].data);
    }
}

TEST_CASE("adam rejects non-finite updates with diagnostics", "[nn]") {
    auto st = init_network({LayerSpec::dense(2, 2, Activation::Softmax)}, {2}, 3);
    Gradients grads;
    grads.dw.assign(1, Tensor(st.weights[0].shape));
    grads.db.assign(1, Tensor(st.biases[0].shape));
    grads.dw[0].data[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(adam_step(st, grads, {}), NonFiniteUpdate);

    Gradients bad;
    bad.dw.assign(1, Tensor({3, 3}));
    bad.db.assign(1, Tensor(st.biases[0].shape));
    CHECK_THROWS_AS(adam_step(st, bad, {}), ShapeMismatch);
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

namespace {

Dataset toy_two_class(std::size_t n, Rng& rng) {
    Dataset ds;
    ds.inputs = Tensor({n, 2});
    ds.labels = Tensor({n, 2});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cls = i % 2;
        const double cx = cls == 0 ? -1.0 : 1.0;
        ds.inputs.data[i * 2 + 0] = cx + uniform_real(rng, -0.3, 0.3);
        ds.inputs.data[i * 2 + 1] = cx + uniform_real(rng, -0.3, 0.3);
        ds.labels.data[i * 2 + cls] = 1.0;
    }
    return ds;
}

}  // namespace

TEST_CASE("training solves a linearly separable toy problem", "[nn][train]") {
    Rng rng(31);
    const Dataset train_set = toy_two_class(40, rng);
    const std::vector<LayerSpec> specs = {LayerSpec::dense(2, 8, Activation::Relu),
                                          LayerSpec::dense(8, 2, Activation::Softmax)};
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.max_epochs = 200;
    cfg.patience = 200;
    cfg.seed = 4;
    const auto [state, report] = train(specs, train_set, {}, cfg);
    CHECK(evaluate(state, train_set).first == 1.0);
    CHECK(report.chance_level == 0.5);
    CHECK(report.epochs.size() <= 200);
}

TEST_CASE("training is deterministic per seed", "[nn][train]") {
    Rng rng(77);
    const Dataset train_set = toy_two_class(24, rng);
    const Dataset val_set = toy_two_class(8, rng);
    const std::vector<LayerSpec> specs = {LayerSpec::dense(2, 6, Activation::Relu),
                                          LayerSpec::dropout(0.3),
                                          LayerSpec::dense(6, 2, Activation::Softmax)};
    TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.patience = 30;
    cfg.seed = 12;
    const auto [s1, r1] = train(specs, train_set, val_set, cfg);
    const auto [s2, r2] = train(specs, train_set, val_set, cfg);
    REQUIRE(r1.epochs.size() == r2.epochs.size());
    for (std::size_t e = 0; e < r1.epochs.size(); ++e) {
        CHECK(r1.epochs[e].train_loss == r2.epochs[e].train_loss);
        CHECK(r1.epochs[e].val_loss == r2.epochs[e].val_loss);
    }
    for (std::size_t li = 0; li < s1.weights.size(); ++li)
        CHECK(s1.weights[li].data == s2.weights[li].data);
}

TEST_CASE("patience zero stops one epoch after the first non-improvement", "[nn][train]") {
    Rng rng(5);
    const Dataset train_set = toy_two_class(16, rng);
    const Dataset val_set = toy_two_class(6, rng);
    const std::vector<LayerSpec> specs = {LayerSpec::dense(2, 4, Activation::Relu),
                                          LayerSpec::dense(4, 2, Activation::Softmax)};
    TrainConfig cfg;
    cfg.learning_rate = 0.05;  // noisy on purpose
    cfg.max_epochs = 100;
    cfg.patience = 0;
    cfg.seed = 19;
    const auto [state, report] = train(specs, train_set, val_set, cfg);
    const auto& epochs = report.epochs;
    REQUIRE(!epochs.empty());
    if (epochs.size() < 100) {
        // every epoch but the last strictly improved the best validation loss
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e + 1 < epochs.size(); ++e) {
            CHECK(epochs[e].val_loss < best);
            best = std::min(best, epochs[e].val_loss);
        }
        CHECK(epochs.back().val_loss >= best);
    }
}

TEST_CASE("early stopping restores the best-validation weights", "[nn][train]") {
    Rng rng(41);
    const Dataset train_set = toy_two_class(24, rng);
    const Dataset val_set = toy_two_class(10, rng);
    const std::vector<LayerSpec> specs = {LayerSpec::dense(2, 6, Activation::Relu),
                                          LayerSpec::dense(6, 2, Activation::Softmax)};
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.max_epochs = 60;
    cfg.patience = 5;
    cfg.seed = 3;
    const auto [state, report] = train(specs, train_set, val_set, cfg);
    REQUIRE(report.best_epoch >= 1);
    const double restored_val_loss = evaluate(state, val_set).second;
    const double reported =
        report.epochs[static_cast<std::size_t>(report.best_epoch - 1)].val_loss;
    CHECK_THAT(restored_val_loss, Catch::Matchers::WithinAbs(reported, 1e-12));
}

// ---------------------------------------------------------------------------
// Evaluate / embed
// ---------------------------------------------------------------------------

TEST_CASE("evaluate matches a per-sample oracle and breaks ties low", "[nn]") {
    Rng rng(61);
    const auto st = init_network(build_unigram_net(), {11}, 15);
    Dataset ds;
    ds.inputs = random_tensor({10, 11}, rng, 0.0, 1.0);
    ds.labels = one_hot_labels(10, 8, rng);
    const auto [acc, loss] = evaluate(st, ds);

    const auto out = forward(st, ds.inputs, Mode::Eval);
    std::size_t correct = 0;
    for (std::size_t b = 0; b < 10; ++b) {
        std::size_t pred = 0, truth = 0;
        for (std::size_t c = 1; c < 8; ++c) {
            if (out.probs.data[b * 8 + c] > out.probs.data[b * 8 + pred]) pred = c;
            if (ds.labels.data[b * 8 + c] > ds.labels.data[b * 8 + truth]) truth = c;
        }
        if (pred == truth) ++correct;
    }
    CHECK(acc == static_cast<double>(correct) / 10.0);
    CHECK(loss >= 0.0);

    // zeroed network emits uniform probabilities; argmax tie resolves to 0
    auto flat = init_network({LayerSpec::dense(3, 4, Activation::Softmax)}, {3}, 2);
    for (double& w : flat.weights[0].data) w = 0.0;
    Dataset tie;
    tie.inputs = random_tensor({6, 3}, rng);
    tie.labels = Tensor({6, 4});
    for (std::size_t i = 0; i < 6; ++i) tie.labels.data[i * 4 + (i % 2 == 0 ? 0 : 1)] = 1.0;
    CHECK(evaluate(flat, tie).first == 0.5);  // class-0 labels only
}

TEST_CASE("embed returns eval-mode probability rows", "[nn]") {
    Rng rng(71);
    const auto st = init_network(build_unigram_net(), {11}, 19);
    const Tensor x = random_tensor({5, 11}, rng, 0.0, 1.0);
    const auto e1 = embed(st, x);
    const auto e2 = embed(st, x);
    REQUIRE(e1.size() == 5);
    CHECK(e1 == e2);
    for (const auto& row : e1) {
        REQUIRE(row.size() == 8);
        double sum = 0.0;
        for (double p : row) sum += p;
        CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("an overfit toy model embeds train points near one-hot", "[nn]") {
    Rng rng(81);
    const Dataset train_set = toy_two_class(20, rng);
    const std::vector<LayerSpec> specs = {LayerSpec::dense(2, 16, Activation::Relu),
                                          LayerSpec::dense(16, 2, Activation::Softmax)};
    TrainConfig cfg;
    cfg.learning_rate = 0.02;
    cfg.max_epochs = 300;
    cfg.patience = 300;
    cfg.seed = 8;
    const auto [state, report] = train(specs, train_set, {}, cfg);
    const auto vectors = embed(state, train_set.inputs);
    for (const auto& row : vectors) {
        const double top = std::max(row[0], row[1]);
        CHECK(top > 0.9);
    }
}
