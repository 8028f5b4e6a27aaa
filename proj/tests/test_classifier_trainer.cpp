#include "doctest.h"

#include "support/reference.hpp"

#include "aose/classifier_trainer.hpp"
#include "aose/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace aose;

namespace {

TrainConfig quick(std::size_t epochs, std::size_t batch, std::size_t accum = 1, double lr = 1e-3) {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.batch_size = batch;
    cfg.accumulation_steps = accum;
    cfg.epochs = epochs;
    cfg.seed = 7;
    return cfg;
}

double max_abs_diff(const HeadModel& a, const HeadModel& b) {
    double worst = 0.0;
    const auto ta = a.tensors();
    const auto tb = b.tensors();
    for (std::size_t t = 0; t < ta.size(); ++t) {
        for (std::size_t i = 0; i < ta[t].size(); ++i) worst = std::max(worst, std::abs(ta[t][i] - tb[t][i]));
    }
    return worst;
}

} // namespace

TEST_CASE("classify and predict") {
    ClassifierParams zero{Matrix(3, 4), Vector(3)};
    const Vector v{0.1, -0.2, 0.3, 0.4};
    CHECK(classify(zero, v) == Vector(3));
    CHECK(predict(classify(zero, v)) == 0);

    ClassifierParams id{Matrix::identity(3), Vector(3)};
    CHECK(predict(classify(id, Vector{0.0, 0.0, 1.0})) == 2);

    ClassifierParams two{Matrix::identity(2), Vector{0.0, 0.5}};
    const Vector logits = classify(two, Vector{0.4, 0.1});
    CHECK(logits[0] == doctest::Approx(0.4));
    CHECK(logits[1] == doctest::Approx(0.6));
    CHECK(predict(logits) == 1);

    CHECK(predict(Vector{1.0, 3.0, 3.0}) == 1);
    CHECK_THROWS_AS(classify(two, Vector{1.0}), Error);
}

TEST_CASE("cross_entropy") {
    const CrossEntropy u = cross_entropy(Vector(5), 3);
    CHECK(u.loss == doctest::Approx(std::log(5.0)).epsilon(1e-15));

    const CrossEntropy big = cross_entropy(Vector{1000.0, 0.0}, 0);
    CHECK(std::isfinite(big.loss));
    CHECK(big.loss >= 0.0);
    CHECK(big.loss < 1e-300);
    CHECK(cross_entropy(Vector{1000.0, 0.0}, 1).loss == doctest::Approx(1000.0));

    // Frozen from a 50-digit evaluation.
    const CrossEntropy ce = cross_entropy(Vector{0.4, 0.6}, 1);
    CHECK(ce.loss == doctest::Approx(0.59813886938159183968).epsilon(1e-15));
    CHECK(ce.grad_logits[0] == doctest::Approx(0.45016600268752209144).epsilon(1e-15));
    CHECK(ce.grad_logits[1] == doctest::Approx(-0.45016600268752209144).epsilon(1e-15));

    CHECK_THROWS_AS(cross_entropy(Vector{0.0, 1.0}, 2), Error);
}

TEST_CASE("document gradients agree with the reference loss") {
    SplitMix64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + rng.below(8);
        const std::size_t k = 2 + rng.below(4);
        const HeadModel m = testing::random_model(rng, d, k);
        std::vector<Vector> s;
        for (std::size_t i = 0, t = 1 + rng.below(6); i < t; ++i) s.push_back(testing::random_unit(rng, d));
        const std::size_t label = rng.below(k);
        const DocumentGrads g = document_grads(m, s, label);
        CHECK(std::abs(testing::Real(g.loss) - testing::ref_loss(m, testing::raw(s), label)) < 1e-13L);
        CHECK(g.predicted == testing::ref_predict(m, testing::raw(s)));
    }
}

TEST_CASE("adam_step") {
    SplitMix64 rng(22);
    const HeadModel start = testing::random_model(rng, 3, 2);

    HeadModel m = start;
    AdamState state = AdamState::for_model(m);
    adam_step(m, HeadModel::zeros_like(m), state, 0.1);
    CHECK(m == start);
    CHECK(state.step == 1);

    HeadModel g = HeadModel::zeros_like(start);
    for (auto t : g.tensors()) {
        for (double& x : t) x = 0.25;
    }
    g.attention.bias[1] = -3.0;
    m = start;
    state = AdamState::for_model(m);
    adam_step(m, g, state, 0.01);
    // First bias-corrected step moves each parameter by lr * g / (|g| + eps).
    CHECK(m.attention.transform(0, 0) - start.attention.transform(0, 0) ==
          doctest::Approx(-0.01 * 0.25 / (0.25 + 1e-8)).epsilon(1e-12));
    CHECK(m.attention.bias[1] - start.attention.bias[1] == doctest::Approx(0.01 * 3.0 / (3.0 + 1e-8)).epsilon(1e-12));

    HeadModel again = start;
    AdamState again_state = AdamState::for_model(again);
    adam_step(again, g, again_state, 0.01);
    CHECK(again == m);

    g.classifier.weights(1, 2) = std::numeric_limits<double>::infinity();
    const HeadModel before = m;
    try {
        adam_step(m, g, state, 0.01);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFinite);
        CHECK(std::string(e.what()).find("classifier.weights") != std::string::npos);
    }
    CHECK(m == before);
    CHECK(state.step == 1);
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    CHECK(cfg.learning_rate == 2e-5);
    CHECK(cfg.batch_size == 16);
    CHECK(cfg.accumulation_steps == 1);
    CHECK(cfg.epochs == 50);
    CHECK_NOTHROW(cfg.validate());
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.learning_rate = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.accumulation_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.threads = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);

    CHECK(train_mode_from_string("frozen") == TrainMode::Frozen);
    CHECK(train_mode_from_string("input-grads") == TrainMode::InputGrads);
    CHECK(to_string(TrainMode::InputGrads) == "input-grads");
    CHECK_THROWS_AS(train_mode_from_string("finetune"), Error);
}

TEST_CASE("train rejects bad corpora") {
    EmbeddingCorpus empty;
    empty.dimension = 4;
    empty.label_count = 2;
    CHECK_THROWS_AS(train(empty, quick(1, 4)), Error);

    EmbeddingCorpus one_label = testing::random_corpus(4, 4, 2, 1);
    one_label.label_count = 1;
    for (auto& d : one_label.documents) d.label = 0;
    CHECK_THROWS_AS(train(one_label, quick(1, 4)), Error);

    EmbeddingCorpus mixed = testing::random_corpus(4, 4, 2, 1);
    mixed.documents[3].sentences[0] = Vector(5);
    CHECK_THROWS_AS(train(mixed, quick(1, 4)), Error);

    const EmbeddingCorpus ok = testing::random_corpus(4, 4, 2, 1);
    CHECK_THROWS_AS(train_from(HeadModel::initialize(5, 2, Seed{1}), ok, quick(1, 4)), Error);
}

TEST_CASE("zero learning rate keeps the initialization") {
    const EmbeddingCorpus corpus = testing::random_corpus(10, 6, 3, 2);
    const TrainConfig cfg = quick(1, 4, 1, 0.0);
    const TrainResult r = train(corpus, cfg);
    CHECK(r.model == HeadModel::initialize(6, 3, Seed{cfg.seed}));
    REQUIRE(r.epochs.size() == 1);
    CHECK(r.epochs[0].epoch == 0);
    CHECK(r.epochs[0].mean_loss > 0.0);
}

TEST_CASE("epoch order") {
    const auto a = epoch_order(20, 7, 1);
    CHECK(a == epoch_order(20, 7, 1));
    CHECK_FALSE(a == epoch_order(20, 7, 2));
    CHECK_FALSE(a == epoch_order(20, 8, 1));
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("gradient accumulation equals a larger batch") {
    const EmbeddingCorpus corpus = testing::random_corpus(64, 8, 2, 3);
    const HeadModel a = train(corpus, quick(3, 16, 1)).model;
    const HeadModel b = train(corpus, quick(3, 4, 4)).model;
    const HeadModel c = train(corpus, quick(3, 1, 16)).model;
    CHECK(max_abs_diff(a, b) < 1e-9);
    CHECK(max_abs_diff(a, c) < 1e-9);
    CHECK(max_abs_diff(a, HeadModel::initialize(8, 2, Seed{7})) > 1e-4);

    // 40 documents: the last effective batch of each epoch is partial.
    const EmbeddingCorpus uneven = testing::random_corpus(40, 8, 2, 4);
    CHECK(max_abs_diff(train(uneven, quick(2, 12, 1)).model, train(uneven, quick(2, 3, 4)).model) < 1e-9);
    CHECK(max_abs_diff(train(uneven, quick(2, 12, 1)).model, train(uneven, quick(2, 2, 6)).model) < 1e-9);
}

TEST_CASE("training is deterministic and independent of threads") {
    const EmbeddingCorpus corpus = testing::random_corpus(30, 8, 3, 5);
    TrainConfig cfg = quick(3, 8, 2);
    const TrainResult a = train(corpus, cfg);
    const TrainResult b = train(corpus, cfg);
    CHECK(a.model == b.model);
    cfg.threads = 4;
    const TrainResult c = train(corpus, cfg);
    CHECK(a.model == c.model);
    for (std::size_t e = 0; e < a.epochs.size(); ++e) {
        CHECK(a.epochs[e].mean_loss == c.epochs[e].mean_loss);
        CHECK(a.epochs[e].accuracy == c.epochs[e].accuracy);
    }
    cfg.seed = 8;
    CHECK_FALSE(train(corpus, cfg).model == a.model);
}

TEST_CASE("frozen training leaves the inputs untouched") {
    const EmbeddingCorpus corpus = testing::random_corpus(20, 8, 2, 6);
    const EmbeddingCorpus copy = corpus;
    train(corpus, quick(2, 4));
    CHECK(corpus == copy);

    TrainConfig cfg = quick(2, 4);
    cfg.mode = TrainMode::InputGrads;
    const TrainResult r = train(corpus, cfg);
    CHECK(corpus == copy);
    for (const auto& m : r.epochs) CHECK(m.mean_input_grad_norm > 0.0);
    CHECK(r.model == train(corpus, quick(2, 4)).model);
    for (const auto& m : train(corpus, quick(2, 4)).epochs) CHECK(m.mean_input_grad_norm == 0.0);
}

TEST_CASE("separable corpus: smoothed loss does not increase") {
    const EmbeddingCorpus corpus = testing::separable_corpus(60, 16, 9);
    const TrainResult r = train(corpus, quick(60, 16));
    for (const auto& m : r.epochs) {
        CHECK(m.mean_loss >= 0.0);
        CHECK(m.accuracy >= 0.0);
        CHECK(m.accuracy <= 1.0);
    }
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e + 5 <= r.epochs.size(); ++e) {
        double window = 0.0;
        for (std::size_t i = e; i < e + 5; ++i) window += r.epochs[i].mean_loss / 5.0;
        CHECK(window <= prev);
        prev = window;
    }
    CHECK(r.epochs.back().mean_loss < r.epochs.front().mean_loss);
    CHECK(r.epochs.back().accuracy > r.epochs.front().accuracy);
}

TEST_CASE("checkpoint round trip") {
    const EmbeddingCorpus corpus = testing::random_corpus(12, 5, 3, 10);
    TrainConfig cfg = quick(2, 4, 2);
    cfg.mode = TrainMode::InputGrads;
    cfg.threads = 3;
    const TrainResult r = train(corpus, cfg);

    std::stringstream buf;
    save_checkpoint(buf, {r.model, cfg});
    const std::string text = buf.str();
    const Checkpoint back = load_checkpoint(buf);
    CHECK(back.model == r.model);
    CHECK(back.config.learning_rate == cfg.learning_rate);
    CHECK(back.config.batch_size == 4);
    CHECK(back.config.accumulation_steps == 2);
    CHECK(back.config.epochs == 2);
    CHECK(back.config.seed == 7);
    CHECK(back.config.mode == TrainMode::InputGrads);

    std::stringstream again;
    save_checkpoint(again, back);
    CHECK(again.str() == text);

    std::istringstream broken("{\"format\":\"aose-checkpoint\",\"version\":1}");
    CHECK_THROWS_AS(load_checkpoint(broken), Error);
    std::istringstream junk("not json");
    CHECK_THROWS_AS(load_checkpoint(junk), Error);
    std::istringstream other("{\"format\":\"something-else\"}");
    CHECK_THROWS_AS(load_checkpoint(other), Error);
}
