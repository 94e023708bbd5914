#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "rdgcn/checkpoint.hpp"
#include "rdgcn/error.hpp"
#include "rdgcn/oracle.hpp"
#include "rdgcn/synthetic.hpp"
#include "rdgcn/training.hpp"

using namespace rdgcn;

namespace {

// Small-but-real configuration so training tests stay fast.
TrainConfig tiny_config(unsigned long long seed = 3) {
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.model.embed_dim = 12;
    cfg.model.hidden_dim = 12;
    cfg.seed = seed;
    return cfg;
}

SyntheticConfig tiny_corpus() {
    SyntheticConfig syn;
    syn.train_size = 120;
    syn.test_size = 45;
    syn.seed = 5;
    return syn;
}

const std::set<std::string> kPolarityWords = {"great",    "excellent", "tasty",
                                              "dreadful", "terrible",  "awful",
                                              "okay",     "average",   "ordinary"};
const std::set<std::string> kNegatorWords = {"not", "never", "hardly"};
const std::set<std::string> kEchoWords[3] = {
    {"regret", "complained", "returned"},
    {"fine", "acceptable", "usual"},
    {"loved", "recommended", "enjoyed"},
};

int face_polarity(const std::string& word) {
    if (word == "great" || word == "excellent" || word == "tasty") return 2;
    if (word == "dreadful" || word == "terrible" || word == "awful") return 0;
    return 1;
}

}  // namespace

TEST_CASE("perfect predictions score 1.0 on both metrics") {
    const std::vector<int> truth{0, 1, 2, 2, 1, 0};
    const EvalReport report = evaluate_predictions(truth, truth, 3);
    CHECK(report.accuracy == 1.0);
    CHECK(report.macro_f1 == 1.0);
    CHECK(report.total == 6);
}

TEST_CASE("a constant predictor on a balanced set gets 1/3 accuracy, 1/6 macro F1") {
    std::vector<int> truth;
    std::vector<int> predicted;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 10; ++i) {
            truth.push_back(c);
            predicted.push_back(1);
        }
    }
    const EvalReport report = evaluate_predictions(truth, predicted, 3);
    CHECK(report.accuracy == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(report.macro_f1 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(report.per_class[1].recall == 1.0);
    CHECK(report.per_class[0].f1 == 0.0);
}

TEST_CASE("the confusion matrix is internally consistent") {
    const std::vector<int> truth{0, 0, 1, 2, 2, 2, 1};
    const std::vector<int> predicted{0, 1, 1, 2, 0, 2, 1};
    const EvalReport report = evaluate_predictions(truth, predicted, 3);

    long total = 0;
    long diagonal = 0;
    for (int c = 0; c < 3; ++c) {
        long row = 0;
        for (int j = 0; j < 3; ++j) {
            row += report.confusion[c][j];
            total += report.confusion[c][j];
        }
        CHECK(row == report.per_class[c].support);
        diagonal += report.confusion[c][c];
    }
    CHECK(total == report.total);
    CHECK(std::abs(report.accuracy - static_cast<double>(diagonal) / total) <= 1e-12);
}

TEST_CASE("evaluation refuses an empty split") {
    CHECK_THROWS_AS(evaluate_predictions({}, {}, 3), InputError);
}

TEST_CASE("degenerate configurations are rejected up front") {
    TrainConfig cfg = tiny_config();
    cfg.bandit.window = 0;  // a window that would freeze the search at start
    CHECK_THROWS_AS(cfg.validate(), InputError);

    cfg = tiny_config();
    cfg.val_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.val_fraction = 0.7;
    CHECK_THROWS_AS(cfg.validate(), InputError);

    cfg = tiny_config();
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), InputError);

    cfg = tiny_config();
    cfg.mode = TrainMode::Eq2Control;
    cfg.bandit.k_max = 50.0;  // slope beyond the distance bound
    CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("token vocabulary reserves pad and unk") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());
    const TokenVocab vocab = TokenVocab::build(data.train);
    CHECK(vocab.labels()[TokenVocab::kPadId] == "<pad>");
    CHECK(vocab.labels()[TokenVocab::kUnkId] == "<unk>");
    CHECK(vocab.id_of("no-such-token-anywhere") == TokenVocab::kUnkId);
    const TokenVocab rebuilt = TokenVocab::from_labels(vocab.labels());
    CHECK(rebuilt.labels() == vocab.labels());
    CHECK_THROWS_AS(TokenVocab::from_labels({"<pad>"}), InputError);
}

TEST_CASE("synthetic sentences carry the documented structure") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());
    REQUIRE(data.train.size() == 120);
    REQUIRE(data.test.size() == 45);

    long label_counts[3] = {0, 0, 0};
    for (const Example& ex : data.train) {
        ++label_counts[ex.label];
        CHECK_FALSE(validate_tree(ex.tree).has_value());
        CHECK(ex.aspect_len() == 1);
        const int n = ex.tree.size();
        CHECK(n >= 5);
        CHECK(n <= 12);

        const IntGrid dist = min_tree_distances(ex.tree, n + 1);
        const int aspect = ex.aspect_begin;

        // Exactly one polarity word at distance 1; its face value matches
        // the label unless a negator appears (always at distance 3).
        int opinion = -1;
        bool negated = false;
        for (int i = 0; i < n; ++i) {
            const std::string& form = ex.tree.tokens[i].form;
            if (kPolarityWords.contains(form) && dist.at(aspect, i) == 1) {
                CHECK(opinion == -1);
                opinion = i;
            }
            if (kNegatorWords.contains(form)) {
                CHECK(dist.at(aspect, i) == 3);
                negated = true;
            }
        }
        REQUIRE(opinion >= 0);
        const int face = face_polarity(ex.tree.tokens[opinion].form);
        CHECK((negated ? 2 - face : face) == ex.label);

        // The distractor: some polarity word of the mirrored class at
        // distance exactly 4 (filler noise may share that distance).
        bool distractor_found = false;
        for (int i = 0; i < n; ++i) {
            if (kPolarityWords.contains(ex.tree.tokens[i].form) && dist.at(aspect, i) == 4 &&
                face_polarity(ex.tree.tokens[i].form) == 2 - ex.label) {
                distractor_found = true;
            }
        }
        CHECK(distractor_found);

        // The echo, when the sentence has room, sits at distance 5 and
        // agrees with the label.
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < 3; ++c) {
                if (kEchoWords[c].contains(ex.tree.tokens[i].form)) {
                    CHECK(c == ex.label);
                    CHECK(dist.at(aspect, i) == 5);
                }
            }
        }
    }
    CHECK(label_counts[0] == 40);
    CHECK(label_counts[1] == 40);
    CHECK(label_counts[2] == 40);
}

TEST_CASE("training rejects a split with an empty class") {
    Dataset data = make_synthetic_corpus(tiny_corpus());
    std::erase_if(data.train, [](const Example& ex) { return ex.label == 2; });
    CHECK_THROWS_WITH_AS(Trainer(data, tiny_config()), doctest::Contains("positive"), InputError);
}

TEST_CASE("identical seeds give identical runs") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());
    const TrainConfig cfg = tiny_config(11);
    const TrainResult a = train(data, cfg);
    const TrainResult b = train(data, cfg);
    REQUIRE(a.epochs.size() == b.epochs.size());
    for (size_t e = 0; e < a.epochs.size(); ++e) {
        CHECK(a.epochs[e].mean_loss == b.epochs[e].mean_loss);
        CHECK(a.epochs[e].test.accuracy == b.epochs[e].test.accuracy);
    }
    CHECK(a.final_report.accuracy == b.final_report.accuracy);
    CHECK(a.final_curvature == b.final_curvature);

    const std::string ja = metrics_json(cfg, a.epochs, a.final_report, "t.csv").dump(2);
    const std::string jb = metrics_json(cfg, b.epochs, b.final_report, "t.csv").dump(2);
    CHECK(ja == jb);
}

TEST_CASE("the bandit trace stays within bounds and freezes at most once") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());
    const TrainResult result = train(data, tiny_config(7));
    for (size_t i = 0; i < result.trace.size(); ++i) {
        const BanditTraceRow& row = result.trace[i];
        CHECK(row.curvature >= 0.1);
        CHECK(row.curvature <= 2.0);
        CHECK((row.reward == 1 || row.reward == -1));
        if (row.frozen) CHECK(i + 1 == result.trace.size());
    }
}

TEST_CASE("ablation modes run the same pipeline with the documented swaps") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());

    SUBCASE("no_type leaves the merged adjacency equal to the distance view") {
        std::mt19937_64 rng(2);
        const DepTree tree = random_valid_tree(6, rng);
        const TypeVocab vocab = TypeVocab::build_from_trees({tree});
        ModelConfig mcfg;
        mcfg.embed_dim = 8;
        mcfg.hidden_dim = 8;
        mcfg.dropout_in = 0.0;
        mcfg.dropout_out = 0.0;
        const ModelParams params = ModelParams::init(10, vocab.size(), mcfg, rng);
        EncodedExample ex;
        for (const Token& tok : tree.tokens) ex.token_ids.push_back(2 + tok.index % 6);
        ex.aspect_begin = 0;
        ex.aspect_end = 1;
        ex.label = 0;
        ex.type_ids = build_type_matrix(tree, vocab);
        ex.topo = build_topology_mask(tree);
        const DistanceFnConfig dcfg{.cap = 10, .curvature = 0.6,
                                    .variant = DistanceVariant::Combined};
        const Matrix dis = distance_adjacency(min_tree_distances(tree, 10), dcfg);
        const ForwardCache cache =
            forward(ex, dis, params, mcfg, GraphComposition::NoType, false, rng);
        CHECK(cache.adjacency == dis);
    }

    SUBCASE("no_dis and eq2_control run to completion") {
        TrainConfig cfg = tiny_config(13);
        cfg.epochs = 1;
        const TrainResult no_dis = ablate(data, cfg, TrainMode::NoDis);
        CHECK(no_dis.final_report.total == 45);
        const TrainResult control = ablate(data, cfg, TrainMode::Eq2Control);
        CHECK(control.final_report.total == 45);
        const auto curve = emit_curve(DistanceFnConfig{.cap = 10,
                                                       .curvature = control.final_curvature,
                                                       .variant = DistanceVariant::LinearCut});
        CHECK(curve.size() == 11);
    }
}

TEST_CASE("reward on the test split mirrors the no-validation protocol") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());
    TrainConfig cfg = tiny_config(17);
    cfg.epochs = 1;
    cfg.reward_on_test = true;
    Trainer trainer(data, cfg);
    trainer.run_epochs();
    CHECK(trainer.epoch_stats().size() == 1);
    CHECK(trainer.epoch_stats()[0].val_accuracy == trainer.epoch_stats()[0].test.accuracy);
}

TEST_CASE("a checkpoint resumes bit-compatibly") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());
    TrainConfig cfg = tiny_config(19);
    cfg.epochs = 4;

    Trainer straight(data, cfg);
    straight.run_epochs(4);

    Trainer first_half(data, cfg);
    first_half.run_epochs(2);
    const auto path =
        (std::filesystem::temp_directory_path() / "rdgcn_test_checkpoint.json").string();
    save_checkpoint(first_half.snapshot(), path);

    Trainer resumed(data, load_checkpoint(path));
    CHECK(resumed.epochs_done() == 2);
    resumed.run_epochs(2);
    std::remove(path.c_str());

    // Bitwise-identical parameters and history after the round trip.
    bool params_equal = true;
    std::vector<const Matrix*> lhs;
    straight.params().for_each([&](const std::string&, const Matrix& m) { lhs.push_back(&m); });
    size_t index = 0;
    resumed.params().for_each([&](const std::string&, const Matrix& m) {
        if (!(*lhs[index] == m)) params_equal = false;
        ++index;
    });
    CHECK(params_equal);
    REQUIRE(straight.epoch_stats().size() == resumed.epoch_stats().size());
    for (size_t e = 0; e < straight.epoch_stats().size(); ++e) {
        CHECK(straight.epoch_stats()[e].mean_loss == resumed.epoch_stats()[e].mean_loss);
        CHECK(straight.epoch_stats()[e].test.accuracy == resumed.epoch_stats()[e].test.accuracy);
    }
    CHECK(straight.bandit().curvature() == resumed.bandit().curvature());
    CHECK(straight.trace().size() == resumed.trace().size());
}

TEST_CASE("checkpoints refuse a mismatched dataset") {
    const Dataset data = make_synthetic_corpus(tiny_corpus());
    TrainConfig cfg = tiny_config(23);
    cfg.epochs = 1;
    Trainer trainer(data, cfg);
    trainer.run_epochs();

    SyntheticConfig other = tiny_corpus();
    other.seed = 99;  // different corpus -> different vocabulary
    const Dataset mismatched = make_synthetic_corpus(other);
    const Trainer::Snapshot snap = trainer.snapshot();
    CHECK_THROWS_AS(Trainer(mismatched, snap), InputError);
}

TEST_CASE("a short full-mode run learns the tiny corpus reasonably well") {
    SyntheticConfig syn = tiny_corpus();
    syn.train_size = 300;
    syn.test_size = 90;
    const Dataset data = make_synthetic_corpus(syn);
    TrainConfig cfg = tiny_config(29);
    cfg.epochs = 8;
    const TrainResult result = train(data, cfg);
    CHECK(result.final_report.accuracy >= 0.6);  // smoke bound, full runs live in acceptance
    CHECK(result.final_report.total == 90);
}
