#include <doctest.h>

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "csent/eval.hpp"
#include "csent/model.hpp"
#include "csent/train.hpp"
#include "csent/vocab.hpp"

using namespace csent;

namespace {

// Positives and negatives carry disjoint signature tokens, so every model
// family can separate them quickly.
CommitRecord synth_record(const std::string& repo, int i, bool positive) {
    CommitRecord rec;
    rec.repo = repo;
    rec.sha = repo + "-" + std::to_string(i);
    rec.message = positive ? "tighten input handling" : "routine refactor";
    rec.label = positive ? Label::SecurityRelevant
                         : Label::NotSecurityRelevant;
    FileChange f;
    f.path = "src/A" + std::to_string(i) + ".java";
    if (positive) {
        f.added_lines = {"sanitize ( escape ( input ) ) ;",
                         "validate ( token ) ;"};
        f.removed_lines = {"raw ( input ) ;"};
    } else {
        f.added_lines = {"render ( widget ) ;", "paint ( canvas ) ;"};
        f.removed_lines = {"draw ( widget ) ;"};
    }
    f.before_source = positive ? "raw ( input ) ;" : "draw ( widget ) ;";
    f.after_source =
        positive ? "sanitize ( escape ( input ) ) ;" : "render ( widget ) ;";
    rec.files.push_back(f);
    return rec;
}

SplitSet synth_splits(int per_class_train = 8, int per_class_val = 3,
                      int per_class_test = 3) {
    SplitSet s;
    for (int i = 0; i < per_class_train; ++i) {
        s.train.push_back(synth_record("train-repo", 2 * i, true));
        s.train.push_back(synth_record("train-repo", 2 * i + 1, false));
    }
    for (int i = 0; i < per_class_val; ++i) {
        s.validation.push_back(synth_record("val-repo", 2 * i, true));
        s.validation.push_back(synth_record("val-repo", 2 * i + 1, false));
    }
    for (int i = 0; i < per_class_test; ++i) {
        s.test.push_back(synth_record("test-repo", 2 * i, true));
        s.test.push_back(synth_record("test-repo", 2 * i + 1, false));
    }
    return s;
}

Vocabulary synth_vocab() {
    TokenCounts c;
    for (const char* tok :
         {"sanitize", "escape", "input", "validate", "token", "raw", "render",
          "widget", "paint", "canvas", "draw", "(", ")", ";"}) {
        c.counts[tok] = 10;
    }
    return build_vocabulary(c, 1, 1000);
}

HcnnConfig small_config() {
    HcnnConfig cfg;
    cfg.embedding_dim = 8;
    cfg.window_sizes = {2, 3};
    cfg.filters_per_window = 4;
    cfg.commit_level_window = 2;
    cfg.commit_level_filters = 5;
    cfg.hidden_fc_dim = 6;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.02;
    cfg.regularizers.fc_dropout_p = 0.0;
    cfg.regularizers.embedding_dropout_p = 0.0;
    cfg.regularizers.dropblock_rate = 0.0;
    return cfg;
}

EmbeddingMatrix synth_embeddings(const Vocabulary& vocab, std::size_t dim) {
    EmbeddingMatrix m;
    m.vocab_fingerprint = vocab.fingerprint();
    m.vectors = Matrix<double>(static_cast<std::size_t>(vocab.size()), dim);
    Rng rng(123);
    for (std::size_t i = 0; i < m.vectors.size(); ++i) {
        m.vectors.data()[i] = rng.uniform(-0.05, 0.05);
    }
    for (std::size_t k = 0; k < dim; ++k) {
        m.vectors(Vocabulary::kPadId, k) = 0.0;
    }
    return m;
}

}  // namespace

TEST_SUITE("train-eval") {

TEST_CASE("f1 is the harmonic mean with a safe zero") {
    // 2 * 0.726 * 0.883 / (0.726 + 0.883) = 0.7968402...
    CHECK(f1_score(0.726, 0.883) == doctest::Approx(0.7968402735).epsilon(1e-6));
    CHECK(f1_score(0.726, 0.883) == doctest::Approx(0.797).epsilon(0.001));
    CHECK(f1_score(1.0, 1.0) == 1.0);
    CHECK(f1_score(0.0, 0.0) == 0.0);
    CHECK(f1_score(0.5, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("compute_metrics counts the confusion matrix exactly") {
    //            tp          fp    fn    tn
    std::vector<int> pred = {1, 1, 1, 1, 0, 0, 0, 0};
    std::vector<int> lab  = {1, 1, 1, 0, 1, 0, 0, 0};
    Metrics m = compute_metrics(pred, lab);
    CHECK(m.tp == 3);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
    CHECK(m.tn == 3);
    CHECK(m.accuracy == doctest::Approx(6.0 / 8.0));
    CHECK(m.precision == doctest::Approx(3.0 / 4.0));
    CHECK(m.recall == doctest::Approx(3.0 / 4.0));
    CHECK(m.f1 == doctest::Approx(0.75));
}

TEST_CASE("degenerate confusion matrices stay finite") {
    // Never predicts positive: precision denominator is zero.
    Metrics m = compute_metrics({0, 0, 0}, {1, 1, 0});
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
    CHECK(m.accuracy == doctest::Approx(1.0 / 3.0));

    // No positives in the labels: recall denominator is zero.
    Metrics n = compute_metrics({1, 0}, {0, 0});
    CHECK(n.recall == 0.0);
    CHECK(n.precision == 0.0);
    CHECK(n.f1 == 0.0);

    CHECK_THROWS_AS(compute_metrics({}, {}), EmptyInputError);
    CHECK_THROWS_AS(compute_metrics({1}, {1, 0}), LengthMismatchError);
}

TEST_CASE("lr baseline training separates the synthetic corpus") {
    SplitSet splits = synth_splits();
    Vocabulary vocab = synth_vocab();
    HcnnConfig cfg;
    cfg.learning_rate = 0.5;

    TrainOptions opts;
    opts.max_epochs = 40;
    opts.patience = 40;
    opts.seed = 1;
    TrainOutcome out =
        train_model(ModelVariant::LrBaseline, splits, vocab, cfg, nullptr,
                    opts);
    CHECK(out.epochs_run >= 1);
    CHECK(out.checkpoint.variant == ModelVariant::LrBaseline);
    CHECK(out.best_val_f1 == doctest::Approx(1.0));
    REQUIRE(!out.epoch_val_f1.empty());
    double best_seen = -1.0;
    for (double f1 : out.epoch_val_f1) best_seen = std::max(best_seen, f1);
    CHECK(out.best_val_f1 == doctest::Approx(best_seen));

    EvalResult ev = evaluate(out.checkpoint, splits.test, vocab);
    CHECK(ev.metrics.accuracy == doctest::Approx(1.0));
}

TEST_CASE("diff hcnn trains deterministically for a fixed seed") {
    SplitSet splits = synth_splits(4, 2, 2);
    Vocabulary vocab = synth_vocab();

    TrainOptions opts;
    opts.max_epochs = 3;
    opts.patience = 10;
    opts.seed = 7;
    TrainOutcome a = train_model(ModelVariant::DiffHcnn, splits, vocab,
                                 small_config(), nullptr, opts);
    TrainOutcome b = train_model(ModelVariant::DiffHcnn, splits, vocab,
                                 small_config(), nullptr, opts);
    CHECK(a.epochs_run == b.epochs_run);
    CHECK(a.epoch_train_loss == b.epoch_train_loss);
    CHECK(a.epoch_val_f1 == b.epoch_val_f1);
    REQUIRE(a.checkpoint.tensors.size() == b.checkpoint.tensors.size());
    for (std::size_t i = 0; i < a.checkpoint.tensors.size(); ++i) {
        CHECK(a.checkpoint.tensors[i].value == b.checkpoint.tensors[i].value);
    }

    TrainOptions other = opts;
    other.seed = 8;
    TrainOutcome c = train_model(ModelVariant::DiffHcnn, splits, vocab,
                                 small_config(), nullptr, other);
    CHECK(a.epoch_train_loss != c.epoch_train_loss);
}

TEST_CASE("early stopping respects patience and records epochs") {
    SplitSet splits = synth_splits();
    Vocabulary vocab = synth_vocab();
    HcnnConfig cfg;
    cfg.learning_rate = 0.5;

    TrainOptions opts;
    opts.max_epochs = 60;
    opts.patience = 2;
    opts.seed = 3;
    std::vector<std::tuple<int, double, double>> log;
    opts.on_epoch = [&](int epoch, double loss, double f1) {
        log.emplace_back(epoch, loss, f1);
    };
    TrainOutcome out =
        train_model(ModelVariant::LrBaseline, splits, vocab, cfg, nullptr,
                    opts);
    // Perfect validation F1 arrives early; two non-improving epochs later
    // the loop stops far short of max_epochs.
    CHECK(out.epochs_run < 60);
    CHECK(out.best_val_f1 == doctest::Approx(1.0));
    CHECK(out.checkpoint.metadata.epochs_run == out.epochs_run);
    CHECK(out.checkpoint.metadata.best_val_f1 ==
          doctest::Approx(out.best_val_f1));
    CHECK(out.checkpoint.metadata.seed == 3);

    REQUIRE(static_cast<int>(log.size()) == out.epochs_run);
    for (int e = 0; e < out.epochs_run; ++e) {
        CHECK(std::get<0>(log[e]) == e + 1);
        CHECK(std::get<1>(log[e]) ==
              doctest::Approx(out.epoch_train_loss[e]));
        CHECK(std::get<2>(log[e]) == doctest::Approx(out.epoch_val_f1[e]));
    }
}

TEST_CASE("pretrained embeddings are demanded exactly when configured") {
    SplitSet splits = synth_splits(2, 1, 1);
    Vocabulary vocab = synth_vocab();
    HcnnConfig cfg = small_config();
    EmbeddingMatrix emb = synth_embeddings(vocab, cfg.embedding_dim);

    TrainOptions opts;
    opts.max_epochs = 1;
    opts.patience = 5;

    cfg.embedding_init = EmbeddingInit::PreTrained;
    CHECK_THROWS_AS(train_model(ModelVariant::DiffHcnn, splits, vocab, cfg,
                                nullptr, opts),
                    ConfigError);

    EmbeddingMatrix stale = emb;
    stale.vocab_fingerprint = "0123456789abcdef";
    CHECK_THROWS_AS(train_model(ModelVariant::DiffHcnn, splits, vocab, cfg,
                                &stale, opts),
                    ConfigError);

    cfg.embedding_init = EmbeddingInit::Random;
    CHECK_THROWS_AS(train_model(ModelVariant::DiffHcnn, splits, vocab, cfg,
                                &emb, opts),
                    ConfigError);

    // The lr-baseline ignores embeddings entirely.
    HcnnConfig lr_cfg;
    CHECK_NOTHROW(train_model(ModelVariant::LrBaseline, splits, vocab, lr_cfg,
                              &emb, opts));

    cfg.embedding_init = EmbeddingInit::PreTrained;
    TrainOutcome out =
        train_model(ModelVariant::DiffHcnn, splits, vocab, cfg, &emb, opts);
    CHECK(out.epochs_run == 1);
}

TEST_CASE("frozen embeddings never move during training") {
    SplitSet splits = synth_splits(4, 2, 2);
    Vocabulary vocab = synth_vocab();
    HcnnConfig cfg = small_config();
    cfg.embedding_init = EmbeddingInit::PreTrained;
    cfg.freeze_embeddings = true;
    EmbeddingMatrix emb = synth_embeddings(vocab, cfg.embedding_dim);

    TrainOptions opts;
    opts.max_epochs = 3;
    opts.patience = 10;
    opts.seed = 5;
    TrainOutcome out =
        train_model(ModelVariant::DiffHcnn, splits, vocab, cfg, &emb, opts);

    REQUIRE(out.checkpoint.tensors[0].name == "embeddings");
    const Matrix<float>& trained = out.checkpoint.tensors[0].value;
    REQUIRE(trained.rows() == static_cast<std::size_t>(vocab.size()));
    for (std::size_t i = 0; i < trained.size(); ++i) {
        CHECK(trained.data()[i] ==
              static_cast<float>(emb.vectors.data()[i]));
    }

    // Same run without the freeze moves them.
    cfg.freeze_embeddings = false;
    TrainOutcome moved =
        train_model(ModelVariant::DiffHcnn, splits, vocab, cfg, &emb, opts);
    bool any_change = false;
    const Matrix<float>& loose = moved.checkpoint.tensors[0].value;
    for (std::size_t i = 0; i < loose.size() && !any_change; ++i) {
        any_change = loose.data()[i] !=
                     static_cast<float>(emb.vectors.data()[i]);
    }
    CHECK(any_change);
}

TEST_CASE("class weighting still trains") {
    SplitSet splits = synth_splits();
    // Unbalance the training split: drop most positives.
    std::vector<CommitRecord> kept;
    int pos_kept = 0;
    for (const CommitRecord& r : splits.train) {
        if (r.label == Label::SecurityRelevant && pos_kept >= 2) continue;
        if (r.label == Label::SecurityRelevant) ++pos_kept;
        kept.push_back(r);
    }
    splits.train = kept;

    Vocabulary vocab = synth_vocab();
    HcnnConfig cfg;
    cfg.learning_rate = 0.5;
    TrainOptions opts;
    opts.max_epochs = 40;
    opts.patience = 40;
    opts.class_weighting = true;
    TrainOutcome out = train_model(ModelVariant::LrBaseline, splits, vocab,
                                   cfg, nullptr, opts);
    for (double l : out.epoch_train_loss) CHECK(std::isfinite(l));
    CHECK(out.best_val_f1 == doctest::Approx(1.0));
}

TEST_CASE("empty splits are rejected") {
    Vocabulary vocab = synth_vocab();
    SplitSet s = synth_splits(2, 1, 1);
    SplitSet no_train = s;
    no_train.train.clear();
    CHECK_THROWS_AS(train_model(ModelVariant::LrBaseline, no_train, vocab, {},
                                nullptr, {}),
                    ConfigError);
    SplitSet no_val = s;
    no_val.validation.clear();
    CHECK_THROWS_AS(train_model(ModelVariant::LrBaseline, no_val, vocab, {},
                                nullptr, {}),
                    ConfigError);
}

TEST_CASE("evaluate scores every record in input order") {
    SplitSet splits = synth_splits();
    Vocabulary vocab = synth_vocab();
    HcnnConfig cfg;
    cfg.learning_rate = 0.5;
    TrainOptions opts;
    opts.max_epochs = 30;
    opts.patience = 30;
    TrainOutcome out = train_model(ModelVariant::LrBaseline, splits, vocab,
                                   cfg, nullptr, opts);

    EvalResult ev = evaluate(out.checkpoint, splits.test, vocab);
    REQUIRE(ev.scores.size() == splits.test.size());
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < ev.scores.size(); ++i) {
        const RecordScore& s = ev.scores[i];
        CHECK(s.repo == splits.test[i].repo);
        CHECK(s.sha == splits.test[i].sha);
        CHECK(s.probability_security >= 0.0);
        CHECK(s.probability_security <= 1.0);
        CHECK(s.label ==
              (splits.test[i].label == Label::SecurityRelevant ? 1 : 0));
        if (s.predicted && s.label) ++tp;
        else if (s.predicted && !s.label) ++fp;
        else if (!s.predicted && s.label) ++fn;
        else ++tn;
    }
    CHECK(ev.metrics.tp == tp);
    CHECK(ev.metrics.fp == fp);
    CHECK(ev.metrics.fn == fn);
    CHECK(ev.metrics.tn == tn);

    CHECK_THROWS_AS(evaluate(out.checkpoint, {}, vocab), EmptyInputError);

    TokenCounts other;
    other.counts["different"] = 5;
    Vocabulary other_vocab = build_vocabulary(other, 1, 10);
    CHECK_THROWS_AS(evaluate(out.checkpoint, splits.test, other_vocab),
                    FingerprintMismatch);
}

TEST_CASE("hierarchical variants also pass through evaluate") {
    SplitSet splits = synth_splits(4, 2, 2);
    Vocabulary vocab = synth_vocab();
    TrainOptions opts;
    opts.max_epochs = 2;
    opts.patience = 5;
    opts.seed = 11;
    for (ModelVariant v : {ModelVariant::DiffHrcnn, ModelVariant::PairedHcnn}) {
        CAPTURE(variant_name(v));
        TrainOutcome out = train_model(v, splits, vocab, small_config(),
                                       nullptr, opts);
        EvalResult ev = evaluate(out.checkpoint, splits.test, vocab);
        CHECK(ev.scores.size() == splits.test.size());
        for (const RecordScore& s : ev.scores) {
            CHECK(std::isfinite(s.probability_security));
        }
    }
}

}  // TEST_SUITE
