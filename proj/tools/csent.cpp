// csent: batch front end for the security-commit classification pipeline.
//
// ingest -> mine -> split -> vocab -> pretrain-embeddings -> train ->
// evaluate -> report, plus predict for one-off scoring.  Exit codes:
// 0 success, 1 runtime/data error (stderr line prefixed `error:`),
// 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "csent/checkpoint.hpp"
#include "csent/diff.hpp"
#include "csent/embed.hpp"
#include "csent/errors.hpp"
#include "csent/eval.hpp"
#include "csent/featurize.hpp"
#include "csent/ingest.hpp"
#include "csent/lex.hpp"
#include "csent/model.hpp"
#include "csent/records.hpp"
#include "csent/report.hpp"
#include "csent/split.hpp"
#include "csent/train.hpp"
#include "csent/util.hpp"
#include "csent/version.hpp"
#include "csent/vocab.hpp"

namespace fs = std::filesystem;
using namespace csent;

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Every command that writes artifacts drops its effective settings next
// to them, so a run can be reproduced from the output directory alone.
void write_run_config(const fs::path& out_dir, const std::string& command,
                      const KeyValues& settings) {
    std::string text = "command=" + command + "\n";
    for (const auto& [k, v] : settings) text += k + "=" + v + "\n";
    fs::path dir = out_dir.empty() ? fs::path(".") : out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    write_file((dir / "run-config.txt").string(), text);
}

fs::path parent_dir(const std::string& file_path) {
    fs::path p = fs::path(file_path).parent_path();
    return p.empty() ? fs::path(".") : p;
}

std::vector<std::string> read_nonempty_lines(const std::string& path) {
    std::vector<std::string> out;
    for (std::string& line : split_lines(read_file(path))) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') continue;
        out.push_back(std::move(line));
    }
    return out;
}

std::vector<CommitRecord> load_many(const std::vector<std::string>& paths) {
    std::vector<CommitRecord> all;
    for (const std::string& p : paths) {
        std::vector<CommitRecord> part = load_records(p);
        all.insert(all.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return all;
}

// Token sequences a record contributes to vocabulary/embedding corpora;
// one "sentence" per file stream so windows never span files.
void collect_sentences(const CommitRecord& rec, const FeaturizeOptions& opts,
                       const std::string& view,
                       std::vector<std::vector<std::string>>& sentences) {
    if (view == "diff" || view == "both") {
        DiffFeatures df = featurize_diff(rec.files, opts);
        for (FileTokens& ft : df.files) sentences.push_back(std::move(ft.tokens));
    }
    if (view == "paired" || view == "both") {
        PairedFeatures pf = featurize_paired(rec.files, opts);
        for (PairedFileTokens& pft : pf.files) {
            sentences.push_back(std::move(pft.before));
            sentences.push_back(std::move(pft.after));
        }
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared option blocks
// ---------------------------------------------------------------------------

struct FeaturizeFlags {
    std::size_t max_files = 16;
    std::size_t max_tokens = 2000;

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-files", max_files,
                        "Files kept per commit (head-truncated)")
            ->capture_default_str();
        cmd->add_option("--max-tokens", max_tokens,
                        "Tokens kept per file side (head-truncated)")
            ->capture_default_str();
    }
    FeaturizeOptions options() const { return {max_files, max_tokens}; }
    void record(KeyValues& kv) const {
        kv.emplace_back("max-files", std::to_string(max_files));
        kv.emplace_back("max-tokens", std::to_string(max_tokens));
    }
};

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

struct IngestCmd {
    std::string repo;
    std::string shas_file;
    std::string out;
    std::string label = "benign";
    std::string provenance = "ground-truth";
    std::string repo_name;
    bool all = false;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "ingest", "Extract commit records from a local git clone");
        cmd->add_option("--repo", repo, "Path to the local clone")->required();
        cmd->add_option("--shas", shas_file,
                        "File with one commit sha per line");
        cmd->add_flag("--all", all, "Ingest every commit reachable from HEAD");
        cmd->add_option("--label", label, "Label applied to every record")
            ->check(CLI::IsMember({"benign", "security"}))
            ->capture_default_str();
        cmd->add_option("--provenance", provenance, "Provenance tag")
            ->check(CLI::IsMember({"ground-truth", "mined"}))
            ->capture_default_str();
        cmd->add_option("--repo-name", repo_name,
                        "Repository name stored in records (default: "
                        "basename of --repo)");
        cmd->add_option("--out", out, "Output dataset (JSONL)")->required();
        cmd->callback([this] { run(); });
    }

    void run() const {
        if (shas_file.empty() == !all) {
            throw Error("ingest needs exactly one of --shas or --all");
        }
        std::vector<std::string> shas =
            all ? list_commit_shas(repo) : read_nonempty_lines(shas_file);

        IngestOptions opts;
        opts.label = label == "security" ? Label::SecurityRelevant
                                         : Label::NotSecurityRelevant;
        opts.provenance = provenance == "mined" ? Provenance::Mined
                                                : Provenance::GroundTruth;
        opts.repo_name = repo_name;

        IngestResult result = ingest_repository(repo, shas, opts);
        for (const IngestFailure& f : result.failures) {
            std::cerr << "warning: " << f.sha << ": " << f.reason << "\n";
        }
        if (result.records.empty() && !result.failures.empty()) {
            throw Error("no commit could be ingested");
        }
        save_records(result.records, out);
        write_run_config(parent_dir(out), "ingest",
                         {{"repo", repo},
                          {"shas", all ? "<all>" : shas_file},
                          {"label", label},
                          {"provenance", provenance},
                          {"out", out}});
        std::cout << "ingested " << result.records.size() << " commits ("
                  << result.skipped_no_java << " without Java changes, "
                  << result.failures.size() << " failed)\n";
    }
};

struct MineCmd {
    std::string in;
    std::string patterns_file;
    std::string exclude_from;
    std::string out;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "mine", "Select security-relevant commits by message regex");
        cmd->add_option("--in", in, "Candidate dataset (JSONL)")->required();
        cmd->add_option("--patterns", patterns_file,
                        "Regex file, one pattern per line (default: "
                        "built-in keyword set)");
        cmd->add_option("--exclude-from", exclude_from,
                        "Dataset whose repositories are skipped");
        cmd->add_option("--out", out, "Matched records (JSONL)")->required();
        cmd->callback([this] { run(); });
    }

    void run() const {
        std::vector<CommitRecord> records = load_records(in);
        std::vector<std::string> patterns =
            patterns_file.empty() ? default_mining_patterns()
                                  : read_nonempty_lines(patterns_file);
        std::unordered_set<std::string> exclude;
        if (!exclude_from.empty()) {
            for (const CommitRecord& r : load_records(exclude_from)) {
                exclude.insert(r.repo);
            }
        }
        std::vector<CommitRecord> mined =
            mine_security_commits(records, patterns, exclude);
        save_records(mined, out);
        write_run_config(parent_dir(out), "mine",
                         {{"in", in},
                          {"patterns", patterns_file.empty() ? "<builtin>"
                                                             : patterns_file},
                          {"exclude-from", exclude_from},
                          {"out", out}});
        std::cout << "matched " << mined.size() << " of " << records.size()
                  << " commits\n";
    }
};

struct SplitCmd {
    std::vector<std::string> in;
    std::string ratios = "0.6,0.2,0.2";
    std::uint64_t seed = 0;
    std::string out_dir;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "split", "Build repo-disjoint train/validation/test sets");
        cmd->add_option("--in", in,
                        "Input datasets (JSONL); repeat for ground truth "
                        "plus mined")
            ->required();
        cmd->add_option("--ratios", ratios, "train,validation,test fractions")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
        cmd->add_option("--out-dir", out_dir, "Output directory")->required();
        cmd->callback([this] { run(); });
    }

    void run() const {
        SplitRatios r = parse_ratios();
        std::vector<CommitRecord> records = load_many(in);
        SplitSet split = split_by_repository(records, r, seed);
        fs::create_directories(out_dir);
        save_records(split.train, (fs::path(out_dir) / "train.jsonl").string());
        save_records(split.validation,
                     (fs::path(out_dir) / "validation.jsonl").string());
        save_records(split.test, (fs::path(out_dir) / "test.jsonl").string());
        KeyValues kv;
        for (const std::string& p : in) kv.emplace_back("in", p);
        kv.emplace_back("ratios", ratios);
        kv.emplace_back("seed", std::to_string(seed));
        kv.emplace_back("out-dir", out_dir);
        write_run_config(out_dir, "split", kv);
        std::cout << "train=" << split.train.size()
                  << " validation=" << split.validation.size()
                  << " test=" << split.test.size() << "\n";
    }

    SplitRatios parse_ratios() const {
        SplitRatios r;
        double a, b, c;
        if (std::sscanf(ratios.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3) {
            throw Error("bad --ratios '" + ratios +
                        "', expected three comma-separated fractions");
        }
        r.train = a;
        r.validation = b;
        r.test = c;
        return r;
    }
};

struct VocabCmd {
    std::vector<std::string> in;
    std::uint64_t min_count = 3;
    std::uint64_t max_size = 100000;
    std::string view = "both";
    std::string out;
    FeaturizeFlags feats;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "vocab", "Build the token vocabulary from a dataset");
        cmd->add_option("--in", in, "Input datasets (JSONL)")->required();
        cmd->add_option("--min-count", min_count,
                        "Minimum corpus occurrences for a token")
            ->capture_default_str();
        cmd->add_option("--max-size", max_size,
                        "Maximum vocabulary entries including specials")
            ->capture_default_str();
        cmd->add_option("--view", view,
                        "Token streams to count: diff, paired, or both")
            ->check(CLI::IsMember({"diff", "paired", "both"}))
            ->capture_default_str();
        feats.attach(cmd);
        cmd->add_option("--out", out, "Vocabulary file")->required();
        cmd->callback([this] { run(); });
    }

    void run() const {
        std::vector<CommitRecord> records = load_many(in);
        TokenCounts counts;
        std::vector<std::vector<std::string>> sentences;
        for (const CommitRecord& rec : records) {
            sentences.clear();
            collect_sentences(rec, feats.options(), view, sentences);
            for (const auto& sentence : sentences) {
                for (const std::string& tok : sentence) {
                    ++counts.counts[tok];
                }
            }
        }
        Vocabulary vocab = build_vocabulary(counts, min_count, max_size);
        save_vocabulary(vocab, out);
        KeyValues kv;
        for (const std::string& p : in) kv.emplace_back("in", p);
        kv.emplace_back("min-count", std::to_string(min_count));
        kv.emplace_back("max-size", std::to_string(max_size));
        kv.emplace_back("view", view);
        feats.record(kv);
        kv.emplace_back("out", out);
        write_run_config(parent_dir(out), "vocab", kv);
        std::cout << "vocabulary size " << vocab.size() << " fingerprint "
                  << vocab.fingerprint() << "\n";
    }
};

struct PretrainCmd {
    std::vector<std::string> corpus;
    std::string vocab_file;
    std::string out;
    std::string view = "both";
    CbowConfig cfg;
    FeaturizeFlags feats;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "pretrain-embeddings",
            "Train token embeddings on a dataset corpus");
        cmd->add_option("--corpus", corpus,
                        "Dataset files or directories of *.jsonl")
            ->required();
        cmd->add_option("--vocab", vocab_file, "Vocabulary file")->required();
        cmd->add_option("--view", view,
                        "Token streams to train on: diff, paired, or both")
            ->check(CLI::IsMember({"diff", "paired", "both"}))
            ->capture_default_str();
        cmd->add_option("--dim", cfg.dim, "Embedding dimension")
            ->capture_default_str();
        cmd->add_option("--window", cfg.window, "Context window per side")
            ->capture_default_str();
        cmd->add_option("--negatives", cfg.negatives,
                        "Negative samples per position")
            ->capture_default_str();
        cmd->add_option("--epochs", cfg.epochs, "Training epochs")
            ->capture_default_str();
        cmd->add_option("--lr", cfg.learning_rate,
                        "Initial learning rate (decays linearly)")
            ->capture_default_str();
        cmd->add_option("--unigram-power", cfg.unigram_power,
                        "Exponent of the negative-sampling distribution")
            ->capture_default_str();
        cmd->add_flag("--subsample", cfg.subsample,
                      "Subsample frequent tokens");
        cmd->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
        feats.attach(cmd);
        cmd->add_option("--out", out, "Embedding file")->required();
        cmd->callback([this] { run(); });
    }

    void run() const {
        Vocabulary vocab = load_vocabulary(vocab_file);
        std::vector<std::string> files;
        for (const std::string& c : corpus) {
            if (fs::is_directory(c)) {
                std::vector<std::string> found;
                for (const auto& entry : fs::directory_iterator(c)) {
                    if (entry.path().extension() == ".jsonl") {
                        found.push_back(entry.path().string());
                    }
                }
                std::sort(found.begin(), found.end());
                files.insert(files.end(), found.begin(), found.end());
            } else {
                files.push_back(c);
            }
        }
        std::vector<CommitRecord> records = load_many(files);
        std::vector<std::vector<std::string>> sentences;
        for (const CommitRecord& rec : records) {
            collect_sentences(rec, feats.options(), view, sentences);
        }
        std::vector<std::vector<int>> ids;
        ids.reserve(sentences.size());
        for (const auto& sentence : sentences) {
            ids.push_back(encode_texts(sentence, vocab));
        }
        EmbeddingMatrix matrix = train_cbow(ids, cfg, vocab);
        save_embeddings(out, matrix, vocab);
        KeyValues kv;
        for (const std::string& c : corpus) kv.emplace_back("corpus", c);
        kv.emplace_back("vocab", vocab_file);
        kv.emplace_back("view", view);
        kv.emplace_back("dim", std::to_string(cfg.dim));
        kv.emplace_back("window", std::to_string(cfg.window));
        kv.emplace_back("negatives", std::to_string(cfg.negatives));
        kv.emplace_back("epochs", std::to_string(cfg.epochs));
        kv.emplace_back("lr", fmt_double(cfg.learning_rate));
        kv.emplace_back("unigram-power", fmt_double(cfg.unigram_power));
        kv.emplace_back("subsample", cfg.subsample ? "true" : "false");
        kv.emplace_back("seed", std::to_string(cfg.seed));
        feats.record(kv);
        kv.emplace_back("out", out);
        write_run_config(parent_dir(out), "pretrain-embeddings", kv);
        std::cout << "trained " << matrix.vectors.rows() << "x"
                  << matrix.vectors.cols() << " embeddings over "
                  << sentences.size() << " sentences\n";
    }
};

struct TrainCmd {
    std::string variant = "diff-hcnn";
    std::string train_file;
    std::string val_file;
    std::string vocab_file;
    std::string embeddings_file;
    std::string out;
    std::uint64_t seed = 0;
    HcnnConfig cfg;
    TrainOptions opts;
    std::string windows = "3,5,7";
    FeaturizeFlags feats;

    void attach(CLI::App& app) {
        CLI::App* cmd =
            app.add_subcommand("train", "Train a classifier variant");
        cmd->add_option("--variant", variant,
                        "diff-hcnn | diff-hrcnn | paired-hcnn | "
                        "paired-hrcnn | lr-baseline")
            ->check(CLI::IsMember({"diff-hcnn", "diff-hrcnn", "paired-hcnn",
                                   "paired-hrcnn", "lr-baseline"}))
            ->capture_default_str();
        cmd->add_option("--train", train_file, "Training split (JSONL)")
            ->required();
        cmd->add_option("--val", val_file, "Validation split (JSONL)")
            ->required();
        cmd->add_option("--vocab", vocab_file, "Vocabulary file")->required();
        cmd->add_option("--embeddings", embeddings_file,
                        "Pre-trained embedding file (omitting it means "
                        "random init)");
        cmd->add_option("--seed", seed, "Training seed")->capture_default_str();
        cmd->add_option("--dim", cfg.embedding_dim, "Embedding dimension")
            ->capture_default_str();
        cmd->add_option("--windows", windows, "File-level window sizes")
            ->capture_default_str();
        cmd->add_option("--filters", cfg.filters_per_window,
                        "Filters per window")
            ->capture_default_str();
        cmd->add_option("--commit-window", cfg.commit_level_window,
                        "Commit-level window")
            ->capture_default_str();
        cmd->add_option("--commit-filters", cfg.commit_level_filters,
                        "Commit-level filters")
            ->capture_default_str();
        cmd->add_option("--hidden", cfg.hidden_fc_dim, "Hidden FC width")
            ->capture_default_str();
        cmd->add_option("--batch-size", cfg.batch_size,
                        "Mini-batch size (0 = 16 random / 8 pre-trained)")
            ->capture_default_str();
        cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate")
            ->capture_default_str();
        cmd->add_option("--fc-dropout", cfg.regularizers.fc_dropout_p,
                        "Dropout before the fully-connected head")
            ->capture_default_str();
        cmd->add_option("--embedding-dropout",
                        cfg.regularizers.embedding_dropout_p,
                        "Per-token-type dropout (HR variants)")
            ->capture_default_str();
        cmd->add_option("--dropblock-size", cfg.regularizers.dropblock_size,
                        "DropBlock length (HR variants)")
            ->capture_default_str();
        cmd->add_option("--dropblock-rate", cfg.regularizers.dropblock_rate,
                        "DropBlock rate (HR variants)")
            ->capture_default_str();
        cmd->add_flag("--freeze-embeddings", cfg.freeze_embeddings,
                      "Keep embeddings fixed during training");
        cmd->add_flag("--class-weighting", opts.class_weighting,
                      "Weight samples by inverse class frequency");
        cmd->add_option("--max-epochs", opts.max_epochs, "Epoch cap")
            ->capture_default_str();
        cmd->add_option("--patience", opts.patience,
                        "Early-stop patience (epochs)")
            ->capture_default_str();
        cmd->add_option("--l2", opts.l2_lambda,
                        "L2 penalty (lr-baseline only)")
            ->capture_default_str();
        feats.attach(cmd);
        cmd->add_option("--out", out, "Checkpoint file")->required();
        cmd->callback([this] { run(); });
    }

    void run() {
        Vocabulary vocab = load_vocabulary(vocab_file);
        SplitSet splits;
        splits.train = load_records(train_file);
        splits.validation = load_records(val_file);

        cfg.window_sizes.clear();
        for (const std::string& part : split_csv(windows)) {
            cfg.window_sizes.push_back(std::stoul(part));
        }
        cfg.embedding_init = embeddings_file.empty()
                                 ? EmbeddingInit::Random
                                 : EmbeddingInit::PreTrained;
        opts.seed = seed;
        opts.featurize = feats.options();
        opts.on_epoch = [](int epoch, double loss, double val_f1) {
            std::fprintf(stderr, "epoch %d: train-loss %.4f val-f1 %.4f\n",
                         epoch, loss, val_f1);
        };

        EmbeddingMatrix pretrained;
        const EmbeddingMatrix* pre_ptr = nullptr;
        if (!embeddings_file.empty()) {
            pretrained = load_embeddings(embeddings_file, vocab);
            pre_ptr = &pretrained;
        }

        TrainOutcome outcome = train_model(variant_from_name(variant), splits,
                                           vocab, cfg, pre_ptr, opts);
        save_checkpoint(out, outcome.checkpoint);

        KeyValues kv;
        kv.emplace_back("variant", variant);
        kv.emplace_back("train", train_file);
        kv.emplace_back("val", val_file);
        kv.emplace_back("vocab", vocab_file);
        kv.emplace_back("embeddings", embeddings_file.empty()
                                          ? "<random>"
                                          : embeddings_file);
        kv.emplace_back("seed", std::to_string(seed));
        kv.emplace_back("dim", std::to_string(cfg.embedding_dim));
        kv.emplace_back("windows", windows);
        kv.emplace_back("filters", std::to_string(cfg.filters_per_window));
        kv.emplace_back("commit-window",
                        std::to_string(cfg.commit_level_window));
        kv.emplace_back("commit-filters",
                        std::to_string(cfg.commit_level_filters));
        kv.emplace_back("hidden", std::to_string(cfg.hidden_fc_dim));
        kv.emplace_back("batch-size",
                        std::to_string(cfg.resolved_batch_size()));
        kv.emplace_back("lr", fmt_double(cfg.learning_rate));
        kv.emplace_back("fc-dropout",
                        fmt_double(cfg.regularizers.fc_dropout_p));
        kv.emplace_back("embedding-dropout",
                        fmt_double(cfg.regularizers.embedding_dropout_p));
        kv.emplace_back("dropblock-size",
                        std::to_string(cfg.regularizers.dropblock_size));
        kv.emplace_back("dropblock-rate",
                        fmt_double(cfg.regularizers.dropblock_rate));
        kv.emplace_back("freeze-embeddings",
                        cfg.freeze_embeddings ? "true" : "false");
        kv.emplace_back("class-weighting",
                        opts.class_weighting ? "true" : "false");
        kv.emplace_back("max-epochs", std::to_string(opts.max_epochs));
        kv.emplace_back("patience", std::to_string(opts.patience));
        kv.emplace_back("l2", fmt_double(opts.l2_lambda));
        feats.record(kv);
        kv.emplace_back("out", out);
        write_run_config(parent_dir(out), "train", kv);
        std::cout << "best validation F1 " << fmt_double(outcome.best_val_f1)
                  << " after " << outcome.epochs_run << " epochs\n";
    }

    static std::vector<std::string> split_csv(const std::string& s) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        return parts;
    }
};

struct EvaluateCmd {
    std::string ckpt;
    std::string split_file;
    std::string vocab_file;
    std::string out;
    std::string scores_file;
    std::string split_name;
    FeaturizeFlags feats;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "evaluate", "Score a split with a trained checkpoint");
        cmd->add_option("--ckpt", ckpt, "Checkpoint file")->required();
        cmd->add_option("--split", split_file, "Dataset to score (JSONL)")
            ->required();
        cmd->add_option("--vocab", vocab_file, "Vocabulary file")->required();
        cmd->add_option("--name", split_name,
                        "Split label for reporting (default: dataset "
                        "basename)");
        cmd->add_option("--scores", scores_file,
                        "Per-record score file (default: <out>.scores.jsonl)");
        feats.attach(cmd);
        cmd->add_option("--out", out, "Metrics output (JSON)")->required();
        cmd->callback([this] { run(); });
    }

    void run() const {
        Checkpoint checkpoint = load_checkpoint(ckpt);
        Vocabulary vocab = load_vocabulary(vocab_file);
        std::vector<CommitRecord> records = load_records(split_file);
        EvalResult result =
            evaluate(checkpoint, records, vocab, feats.options());

        const std::string name =
            split_name.empty() ? fs::path(split_file).stem().string()
                               : split_name;
        const std::string scores_path =
            scores_file.empty() ? out + ".scores.jsonl" : scores_file;

        char buf[512];
        const Metrics& m = result.metrics;
        std::string embedding = "-";
        if (checkpoint.variant != ModelVariant::LrBaseline) {
            embedding = checkpoint.config.embedding_init ==
                                EmbeddingInit::PreTrained
                            ? "pre-trained"
                            : "random";
        }
        std::snprintf(
            buf, sizeof buf,
            "{\"variant\":\"%s\",\"embedding\":\"%s\",\"split\":\"%s\","
            "\"metrics\":{\"accuracy\":%.6f,\"precision\":%.6f,"
            "\"recall\":%.6f,\"f1\":%.6f,\"tp\":%llu,\"fp\":%llu,"
            "\"fn\":%llu,\"tn\":%llu}}\n",
            variant_name(checkpoint.variant), embedding.c_str(), name.c_str(),
            m.accuracy, m.precision, m.recall, m.f1,
            static_cast<unsigned long long>(m.tp),
            static_cast<unsigned long long>(m.fp),
            static_cast<unsigned long long>(m.fn),
            static_cast<unsigned long long>(m.tn));
        write_file(out, buf);

        std::string scores_text;
        for (const RecordScore& s : result.scores) {
            std::snprintf(buf, sizeof buf,
                          "{\"repo\":%s,\"sha\":%s,"
                          "\"probability_security\":%.6f,\"predicted\":%d,"
                          "\"label\":%d}\n",
                          nlohmann::json(s.repo).dump().c_str(),
                          nlohmann::json(s.sha).dump().c_str(),
                          s.probability_security, s.predicted, s.label);
            scores_text += buf;
        }
        write_file(scores_path, scores_text);

        write_run_config(parent_dir(out), "evaluate",
                         {{"ckpt", ckpt},
                          {"split", split_file},
                          {"vocab", vocab_file},
                          {"name", name},
                          {"scores", scores_path},
                          {"out", out}});
        std::printf("%s acc=%.3f p=%.3f r=%.3f f1=%.3f\n", name.c_str(),
                    m.accuracy, m.precision, m.recall, m.f1);
    }
};

struct ReportCmd {
    std::vector<std::string> in;
    std::string out_text;
    std::string out_jsonl;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "report", "Render a results table from evaluate outputs");
        cmd->add_option("--in", in, "evaluate output files (JSON)")
            ->required();
        cmd->add_option("--out-text", out_text,
                        "Also write the text table to this file");
        cmd->add_option("--out-jsonl", out_jsonl,
                        "Also write the machine-readable rows to this file");
        cmd->callback([this] { run(); });
    }

    static std::pair<std::string, std::string> describe(
        const std::string& variant) {
        if (variant == "diff-hcnn") return {"diff", "H-CNN"};
        if (variant == "diff-hrcnn") return {"diff", "HR-CNN"};
        if (variant == "paired-hcnn") return {"paired-code", "H-CNN"};
        if (variant == "paired-hrcnn") return {"paired-code", "HR-CNN"};
        if (variant == "lr-baseline") return {"diff", "LR"};
        throw FormatError("unknown variant '" + variant + "' in report input");
    }

    void run() const {
        std::vector<ReportRow> rows;
        for (const std::string& path : in) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_file(path));
            } catch (const nlohmann::json::exception& e) {
                throw FormatError(path + ": " + e.what());
            }
            try {
                ReportRow row;
                auto [features, model] =
                    describe(j.at("variant").get<std::string>());
                row.input_features = features;
                row.model = model;
                row.embedding = j.at("embedding").get<std::string>();
                row.split = j.at("split").get<std::string>();
                const nlohmann::json& m = j.at("metrics");
                row.metrics.accuracy = m.at("accuracy").get<double>();
                row.metrics.precision = m.at("precision").get<double>();
                row.metrics.recall = m.at("recall").get<double>();
                row.metrics.f1 = m.at("f1").get<double>();
                rows.push_back(std::move(row));
            } catch (const nlohmann::json::exception& e) {
                throw FormatError(path + ": " + e.what());
            }
        }
        Report report = render_report(rows);
        std::cout << report.text_table;
        if (!out_text.empty()) write_file(out_text, report.text_table);
        if (!out_jsonl.empty()) write_file(out_jsonl, report.jsonl);
    }
};

struct PredictCmd {
    std::string ckpt;
    std::string vocab_file;
    std::string diff_file;
    std::string record_file;
    FeaturizeFlags feats;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand(
            "predict", "Score one commit with a trained checkpoint");
        cmd->add_option("--ckpt", ckpt, "Checkpoint file")->required();
        cmd->add_option("--vocab", vocab_file, "Vocabulary file")->required();
        cmd->add_option("--diff", diff_file,
                        "Unified-diff patch file (diff and lr models)");
        cmd->add_option("--record", record_file,
                        "One-record JSONL file (required for paired "
                        "models, which need full sources)");
        feats.attach(cmd);
        cmd->callback([this] { run(); });
    }

    void run() const {
        Checkpoint checkpoint = load_checkpoint(ckpt);
        Vocabulary vocab = load_vocabulary(vocab_file);
        if (checkpoint.vocab_fingerprint != vocab.fingerprint()) {
            throw FingerprintMismatch(
                "checkpoint was trained against a different vocabulary");
        }
        if (diff_file.empty() == record_file.empty()) {
            throw Error("predict needs exactly one of --diff or --record");
        }

        CommitRecord record;
        if (!record_file.empty()) {
            std::vector<CommitRecord> records = load_records(record_file);
            if (records.size() != 1) {
                throw Error("--record file must hold exactly one record");
            }
            record = std::move(records[0]);
        } else {
            record.files = parse_unified_diff(read_file(diff_file));
            if (record.files.empty()) {
                throw Error("patch contains no Java changes");
            }
        }

        Prediction p;
        if (checkpoint.variant == ModelVariant::LrBaseline) {
            p = lr_from_checkpoint<float>(checkpoint)
                    .predict(encode_flat_input(record, vocab, feats.options()));
        } else if (variant_is_paired(checkpoint.variant)) {
            if (record_file.empty()) {
                throw Error(
                    "paired checkpoints need --record with before/after "
                    "sources; a patch is not enough");
            }
            p = hcnn_from_checkpoint<float>(checkpoint)
                    .predict(
                        encode_paired_input(record, vocab, feats.options()));
        } else {
            p = hcnn_from_checkpoint<float>(checkpoint)
                    .predict(encode_diff_input(record, vocab, feats.options()));
        }
        std::printf("security_relevant_probability=%.6f\n",
                    p.probability_security);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Security-relevant commit classification toolkit"};
    app.set_version_flag("--version", std::string("csent ") + kVersion);
    app.set_config("--config", "",
                   "key=value settings file ([subcommand] sections)");
    app.require_subcommand(1);

    IngestCmd ingest_cmd;
    MineCmd mine_cmd;
    SplitCmd split_cmd;
    VocabCmd vocab_cmd;
    PretrainCmd pretrain_cmd;
    TrainCmd train_cmd;
    EvaluateCmd evaluate_cmd;
    ReportCmd report_cmd;
    PredictCmd predict_cmd;

    ingest_cmd.attach(app);
    mine_cmd.attach(app);
    split_cmd.attach(app);
    vocab_cmd.attach(app);
    pretrain_cmd.attach(app);
    train_cmd.attach(app);
    evaluate_cmd.attach(app);
    report_cmd.attach(app);
    predict_cmd.attach(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "run 'csent --help' for usage\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
