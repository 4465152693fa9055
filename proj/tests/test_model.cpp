#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "csent/model.hpp"
#include "csent/nn.hpp"
#include "csent/rng.hpp"
#include "csent/vocab.hpp"

using namespace csent;

namespace {

constexpr std::size_t kVocab = 30;

HcnnConfig tiny_config() {
    HcnnConfig cfg;
    cfg.embedding_dim = 8;
    cfg.window_sizes = {2, 3};
    cfg.filters_per_window = 4;
    cfg.commit_level_window = 2;
    cfg.commit_level_filters = 5;
    cfg.hidden_fc_dim = 6;
    cfg.regularizers.fc_dropout_p = 0.0;  // deterministic unit tests
    cfg.regularizers.embedding_dropout_p = 0.0;
    cfg.regularizers.dropblock_rate = 0.0;
    return cfg;
}

DiffInput two_file_diff() {
    DiffInput in;
    in.files.push_back({Vocabulary::kAddId, 7, 8, 9, Vocabulary::kDelId, 10});
    in.files.push_back({Vocabulary::kAddId, 11, Vocabulary::kDelId, 12, 13});
    return in;
}

Vocabulary toy_vocab() {
    TokenCounts counts;
    for (const char* tok : {"int", "x", "=", ";", "y", "{", "}"}) {
        counts.counts[tok] = 3;
    }
    return build_vocabulary(counts, 1, 1000);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("variant names round-trip") {
    for (ModelVariant v :
         {ModelVariant::DiffHcnn, ModelVariant::DiffHrcnn,
          ModelVariant::PairedHcnn, ModelVariant::PairedHrcnn,
          ModelVariant::LrBaseline}) {
        CHECK(variant_from_name(variant_name(v)) == v);
    }
    CHECK_THROWS_AS(variant_from_name("resnet"), ConfigError);
    CHECK(variant_is_paired(ModelVariant::PairedHcnn));
    CHECK(variant_is_paired(ModelVariant::PairedHrcnn));
    CHECK_FALSE(variant_is_paired(ModelVariant::DiffHrcnn));
    CHECK(variant_is_regularized(ModelVariant::DiffHrcnn));
    CHECK(variant_is_regularized(ModelVariant::PairedHrcnn));
    CHECK_FALSE(variant_is_regularized(ModelVariant::DiffHcnn));
}

TEST_CASE("config defaults and validation") {
    HcnnConfig cfg;
    CHECK(cfg.embedding_dim == 300);
    CHECK(cfg.window_sizes == std::vector<std::size_t>{3, 5, 7});
    CHECK(cfg.filters_per_window == 100);
    CHECK(cfg.commit_level_filters == 128);
    CHECK(cfg.hidden_fc_dim == 128);
    CHECK(cfg.learning_rate == 0.001);
    CHECK_NOTHROW(cfg.validate());

    // Batch size convention: explicit wins, otherwise init-dependent.
    CHECK(cfg.resolved_batch_size() == 16);
    cfg.embedding_init = EmbeddingInit::PreTrained;
    CHECK(cfg.resolved_batch_size() == 8);
    cfg.batch_size = 4;
    CHECK(cfg.resolved_batch_size() == 4);

    auto bad = [](auto&& mutate) {
        HcnnConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](HcnnConfig& c) { c.embedding_dim = 0; });
    bad([](HcnnConfig& c) { c.window_sizes.clear(); });
    bad([](HcnnConfig& c) { c.window_sizes = {3, 0}; });
    bad([](HcnnConfig& c) { c.filters_per_window = 0; });
    bad([](HcnnConfig& c) { c.commit_level_window = 0; });
    bad([](HcnnConfig& c) { c.classes = 3; });
    bad([](HcnnConfig& c) { c.learning_rate = 0.0; });
    bad([](HcnnConfig& c) { c.regularizers.dropblock_size = 4; });
    bad([](HcnnConfig& c) { c.regularizers.fc_dropout_p = 1.0; });
}

TEST_CASE("construction rejects bad combinations") {
    CHECK_THROWS_AS(HierarchicalCnn<double>(ModelVariant::LrBaseline,
                                            tiny_config(), kVocab, "fp"),
                    ConfigError);
    // Six specials alone cannot carry a classifier.
    CHECK_THROWS_AS(HierarchicalCnn<double>(ModelVariant::DiffHcnn,
                                            tiny_config(), 6, "fp"),
                    ConfigError);
}

TEST_CASE("random init is seed-deterministic with a zero pad row") {
    HierarchicalCnn<double> a(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                              "fp");
    HierarchicalCnn<double> b(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                              "fp");
    HierarchicalCnn<double> c(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                              "fp");
    Rng r1(9), r2(9), r3(10);
    a.init_random(r1);
    b.init_random(r2);
    c.init_random(r3);

    auto pa = a.parameters();
    auto pb = b.parameters();
    auto pc = c.parameters();
    REQUIRE(pa.size() == pb.size());
    bool any_diff_from_c = false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].first == pb[i].first);
        CHECK(pa[i].second->value == pb[i].second->value);
        any_diff_from_c =
            any_diff_from_c || !(pa[i].second->value == pc[i].second->value);
    }
    CHECK(any_diff_from_c);

    auto& emb = *pa[0].second;
    REQUIRE(pa[0].first == "embeddings");
    for (std::size_t k = 0; k < emb.value.cols(); ++k) {
        CHECK(emb.value(Vocabulary::kPadId, k) == 0.0);
    }
    // Non-pad rows are drawn from ±0.5/D.
    bool nonzero = false;
    for (std::size_t k = 0; k < emb.value.cols(); ++k) {
        const double v = emb.value(7, k);
        CHECK(std::abs(v) <= 0.5 / 8.0);
        nonzero = nonzero || v != 0.0;
    }
    CHECK(nonzero);
}

TEST_CASE("parameter names follow the architecture") {
    HierarchicalCnn<double> diff(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                                 "fp");
    std::vector<std::string> names;
    for (auto& [name, p] : diff.parameters()) names.push_back(name);
    CHECK(names == std::vector<std::string>{
                       "embeddings", "conv2_w", "conv2_b", "conv3_w",
                       "conv3_b", "commit_conv_w", "commit_conv_b", "fc1_w",
                       "fc1_b", "fc2_w", "fc2_b"});

    HierarchicalCnn<double> paired(ModelVariant::PairedHcnn, tiny_config(),
                                   kVocab, "fp");
    names.clear();
    for (auto& [name, p] : paired.parameters()) names.push_back(name);
    CHECK(names == std::vector<std::string>{
                       "embeddings", "conv2_w", "conv2_b", "conv3_w",
                       "conv3_b", "commit_conv_w", "commit_conv_b", "fc_w",
                       "fc_b"});
}

TEST_CASE("diff forward: shapes, determinism, short files") {
    HierarchicalCnn<double> m(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                              "fp");
    Rng rng(3);
    m.init_random(rng);

    DiffInput in = two_file_diff();
    // Third file shorter than the widest window exercises pad-to-window.
    in.files.push_back({7});

    HierarchicalCnn<double>::Workspace ws;
    Matrix<double> logits = m.forward(in, false, nullptr, ws);
    REQUIRE(logits.rows() == 1);
    REQUIRE(logits.cols() == 2);

    HierarchicalCnn<double>::Workspace ws2;
    Matrix<double> again = m.forward(in, false, nullptr, ws2);
    CHECK(logits == again);

    // Numeric-health stats were collected on the way through.
    CHECK(std::isfinite(ws.stats.min_abs_preact));
    CHECK(ws.stats.min_abs_preact >= 0.0);

    Prediction p = m.predict(in);
    CHECK(p.probability_security > 0.0);
    CHECK(p.probability_security < 1.0);
    const int expect =
        logits(0, 1) > logits(0, 0) ? 1 : 0;
    CHECK(p.label == expect);

    // Single-file commits stack below the commit window and get zero-padded.
    DiffInput single;
    single.files.push_back({Vocabulary::kAddId, 7, 8, Vocabulary::kDelId});
    CHECK_NOTHROW(m.predict(single));
}

TEST_CASE("paired forward and input validation") {
    HierarchicalCnn<double> m(ModelVariant::PairedHcnn, tiny_config(), kVocab,
                              "fp");
    Rng rng(5);
    m.init_random(rng);

    PairedInput in;
    in.before.push_back({7, 8, 9});
    in.before.push_back({Vocabulary::kPadId});  // file created by the commit
    in.after.push_back({7, 10, 9, 11});
    in.after.push_back({12, 13});
    HierarchicalCnn<double>::Workspace ws;
    Matrix<double> logits = m.forward(in, false, nullptr, ws);
    REQUIRE(logits.rows() == 1);
    REQUIRE(logits.cols() == 2);
    CHECK(logits == m.forward(in, false, nullptr, ws));

    PairedInput empty;
    CHECK_THROWS_AS(m.predict(empty), EmptyCommitError);
    PairedInput skewed = in;
    skewed.after.pop_back();
    CHECK_THROWS_AS(m.predict(skewed), EmptyCommitError);
}

TEST_CASE("input family must match the variant") {
    HierarchicalCnn<double> diff(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                                 "fp");
    HierarchicalCnn<double> paired(ModelVariant::PairedHcnn, tiny_config(),
                                   kVocab, "fp");
    Rng rng(1);
    diff.init_random(rng);
    paired.init_random(rng);

    PairedInput pin;
    pin.before.push_back({7});
    pin.after.push_back({8});
    CHECK_THROWS_AS(diff.predict(pin), ConfigError);
    CHECK_THROWS_AS(paired.predict(two_file_diff()), ConfigError);

    DiffInput none;
    CHECK_THROWS_AS(diff.predict(none), EmptyCommitError);
}

TEST_CASE("training mode requires an rng and ids must be in range") {
    HierarchicalCnn<double> m(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                              "fp");
    Rng rng(2);
    m.init_random(rng);
    HierarchicalCnn<double>::Workspace ws;
    CHECK_THROWS_AS(m.forward(two_file_diff(), true, nullptr, ws),
                    ConfigError);

    DiffInput oob;
    oob.files.push_back({static_cast<int>(kVocab)});
    CHECK_THROWS_AS(m.predict(oob), ShapeError);
    DiffInput neg;
    neg.files.push_back({-1});
    CHECK_THROWS_AS(m.predict(neg), ShapeError);
}

TEST_CASE("exactly tied logits predict the negative class") {
    Matrix<double> logits(1, 2);
    logits(0, 0) = 1.25;
    logits(0, 1) = 1.25;
    Prediction p = HierarchicalCnn<double>::prediction_from_logits(logits);
    CHECK(p.label == 0);
    CHECK(p.probability_security == doctest::Approx(0.5));
}

TEST_CASE("train steps drive the loss down on a single commit") {
    for (ModelVariant v : {ModelVariant::DiffHcnn, ModelVariant::PairedHcnn}) {
        CAPTURE(variant_name(v));
        HierarchicalCnn<double> m(v, tiny_config(), kVocab, "fp");
        Rng rng(17);
        m.init_random(rng);

        DiffInput din = two_file_diff();
        PairedInput pin;
        pin.before.push_back({7, 8, 9, 10});
        pin.after.push_back({7, 11, 9, 10, 12});

        auto loss_now = [&]() {
            return variant_is_paired(v) ? m.eval_loss(pin, 1)
                                        : m.eval_loss(din, 1);
        };
        const double before = loss_now();
        for (int step = 0; step < 100; ++step) {
            if (variant_is_paired(v)) {
                m.train_step(pin, 1, rng);
            } else {
                m.train_step(din, 1, rng);
            }
            for (auto& [name, p] : m.parameters()) nn::adam_step(*p, 0.03);
        }
        const double after = loss_now();
        CHECK(after < before);
        CHECK(after < 0.2);
    }
}

TEST_CASE("train_step returns the unscaled loss") {
    HierarchicalCnn<double> m(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                              "fp");
    Rng rng(21);
    m.init_random(rng);
    DiffInput in = two_file_diff();
    const double unscaled = m.eval_loss(in, 0);
    // fc_dropout_p is zero, so train and eval forwards agree exactly.
    Rng step_rng(1);
    CHECK(m.train_step(in, 0, step_rng, 0.25) == doctest::Approx(unscaled));
}

TEST_CASE("pretrained embeddings must match fingerprint and shape") {
    HierarchicalCnn<double> m(ModelVariant::DiffHcnn, tiny_config(), kVocab,
                              "fp");
    EmbeddingMatrix good;
    good.vocab_fingerprint = "fp";
    good.vectors = Matrix<double>(kVocab, 8);
    good.vectors.fill(0.25);  // pad row nonzero on purpose
    m.set_pretrained_embeddings(good);
    auto params = m.parameters();
    REQUIRE(params[0].first == "embeddings");
    CHECK(params[0].second->value(7, 3) == 0.25);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(params[0].second->value(Vocabulary::kPadId, k) == 0.0);
    }

    EmbeddingMatrix wrong_fp = good;
    wrong_fp.vocab_fingerprint = "other";
    CHECK_THROWS_AS(m.set_pretrained_embeddings(wrong_fp),
                    FingerprintMismatch);
    EmbeddingMatrix wrong_shape = good;
    wrong_shape.vectors = Matrix<double>(kVocab, 9);
    CHECK_THROWS_AS(m.set_pretrained_embeddings(wrong_shape), ConfigError);
}

TEST_CASE("encoders bridge records to id streams") {
    Vocabulary vocab = toy_vocab();
    const int id_int = vocab.id_of("int");
    const int id_x = vocab.id_of("x");
    const int id_eq = vocab.id_of("=");
    const int id_semi = vocab.id_of(";");
    const int id_y = vocab.id_of("y");
    REQUIRE(id_int > 0);
    REQUIRE(id_y > 0);

    CommitRecord rec;
    rec.repo = "demo";
    rec.sha = "abc";
    FileChange f1;
    f1.path = "A.java";
    f1.added_lines = {"int x = 1;"};
    f1.removed_lines = {"int y;"};
    f1.before_source = "int y;\n";
    f1.after_source = "int x = 1;\n";
    rec.files.push_back(f1);
    FileChange f2;
    f2.path = "B.java";
    f2.added_lines = {"x = x;"};
    f2.before_source = "";
    f2.after_source = "x = x;\n";
    rec.files.push_back(f2);

    DiffInput din = encode_diff_input(rec, vocab);
    REQUIRE(din.files.size() == 2);
    CHECK(din.files[0] ==
          TokenSeq{Vocabulary::kAddId, id_int, id_x, id_eq, Vocabulary::kNumId,
                   id_semi, Vocabulary::kDelId, id_int, id_y, id_semi});
    CHECK(din.files[1] == TokenSeq{Vocabulary::kAddId, id_x, id_eq, id_x,
                                   id_semi, Vocabulary::kDelId});

    PairedInput pin = encode_paired_input(rec, vocab);
    REQUIRE(pin.before.size() == 2);
    REQUIRE(pin.after.size() == 2);
    CHECK(pin.before[0] == TokenSeq{id_int, id_y, id_semi});
    CHECK(pin.after[0] == TokenSeq{id_int, id_x, id_eq, Vocabulary::kNumId,
                                   id_semi});
    // A file with no pre-image gets the pad placeholder.
    CHECK(pin.before[1] == TokenSeq{Vocabulary::kPadId});
    CHECK(pin.after[1] == TokenSeq{id_x, id_eq, id_x, id_semi});

    std::vector<int> flat = encode_flat_input(rec, vocab);
    TokenSeq expected = din.files[0];
    expected.push_back(Vocabulary::kSepId);
    expected.insert(expected.end(), din.files[1].begin(), din.files[1].end());
    CHECK(flat == expected);
}

TEST_CASE("unknown tokens encode as <UNK>") {
    Vocabulary vocab = toy_vocab();
    CommitRecord rec;
    FileChange f;
    f.path = "A.java";
    f.added_lines = {"zzz unknownToken"};
    rec.files.push_back(f);
    DiffInput din = encode_diff_input(rec, vocab);
    REQUIRE(din.files.size() == 1);
    CHECK(din.files[0] == TokenSeq{Vocabulary::kAddId, Vocabulary::kUnkId,
                                   Vocabulary::kUnkId, Vocabulary::kDelId});
}

TEST_CASE("lr baseline basics") {
    CHECK_THROWS_AS(LrBaseline<double>(0, "fp"), ConfigError);
    CHECK_THROWS_AS(LrBaseline<double>(10, "fp", -1.0), ConfigError);

    LrBaseline<double> lr(kVocab, "fp", 0.0);
    CHECK(lr.vocab_size() == kVocab);
    CHECK(lr.vocab_fingerprint() == "fp");

    // Zero weights: p = 0.5 exactly, tie resolves to the negative class.
    Prediction p = lr.predict({7, 8});
    CHECK(p.probability_security == doctest::Approx(0.5));
    CHECK(p.label == 0);
    CHECK(lr.eval_loss({7, 8}, 1) == doctest::Approx(std::log(2.0)));

    // Presence features: duplicates add nothing.
    lr.weight_values()(7, 0) = 2.0;
    CHECK(lr.predict({7}).probability_security ==
          doctest::Approx(lr.predict({7, 7, 7}).probability_security));

    CHECK_THROWS_AS(lr.predict({static_cast<int>(kVocab)}), ShapeError);
    CHECK_THROWS_AS(lr.eval_loss({7}, 2), LabelRangeError);
}

TEST_CASE("lr baseline gradient matches the closed form") {
    LrBaseline<double> lr(10, "fp", 0.0);
    auto params = lr.parameters();
    REQUIRE(params.size() == 2);
    REQUIRE(params[0].first == "weight");
    REQUIRE(params[1].first == "bias");

    // Zero weights, ids {7,8}, label 1: p = 0.5, residual = p - y = -0.5.
    const double loss = lr.train_step({7, 8, 8}, 1);
    CHECK(loss == doctest::Approx(std::log(2.0)));
    CHECK(params[0].second->grad(7, 0) == doctest::Approx(-0.5));
    CHECK(params[0].second->grad(8, 0) == doctest::Approx(-0.5));
    CHECK(params[0].second->grad(3, 0) == 0.0);
    CHECK(params[1].second->grad(0, 0) == doctest::Approx(-0.5));

    // Scale folds into the accumulated gradient but not the returned loss.
    LrBaseline<double> lr2(10, "fp", 0.0);
    auto params2 = lr2.parameters();
    CHECK(lr2.train_step({7}, 1, 0.5) == doctest::Approx(std::log(2.0)));
    CHECK(params2[0].second->grad(7, 0) == doctest::Approx(-0.25));
}

TEST_CASE("lr baseline l2 penalty shows up in loss and gradient") {
    LrBaseline<double> lr(10, "fp", 0.2);
    lr.weight_values()(4, 0) = 3.0;
    // loss = softplus(z) - y z + 0.5*lambda*||w||^2 with ids {} -> z = bias.
    const double expected_l2 = 0.5 * 0.2 * 9.0;
    CHECK(lr.eval_loss({9}, 0) ==
          doctest::Approx(std::log(2.0) + expected_l2));

    auto params = lr.parameters();
    lr.train_step({9}, 0);
    // Weight 4 was not present, so only the decay term touches it.
    CHECK(params[0].second->grad(4, 0) == doctest::Approx(0.2 * 3.0));
}

TEST_CASE("lr baseline separates a toy corpus") {
    LrBaseline<double> lr(12, "fp");
    auto params = lr.parameters();
    std::vector<std::pair<std::vector<int>, int>> data = {
        {{6, 7}, 1}, {{6, 8}, 1}, {{9, 10}, 0}, {{9, 11}, 0}};
    for (int epoch = 0; epoch < 300; ++epoch) {
        for (auto& [ids, label] : data) {
            lr.train_step(ids, label);
            for (auto& [name, p] : params) nn::adam_step(*p, 0.05);
        }
    }
    for (auto& [ids, label] : data) {
        CHECK(lr.predict(ids).label == label);
    }
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(std::isfinite(lr.weight_values()(i, 0)));
    }
}

}  // TEST_SUITE
