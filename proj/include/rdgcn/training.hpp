#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rdgcn/bandit.hpp"
#include "rdgcn/model.hpp"
#include "rdgcn/synthetic.hpp"

namespace rdgcn {

// Pipeline ablations. NoDis swaps the distance view for the raw topology,
// NoType zeroes the type view, Eq2Control swaps the combined curve for the
// linear-cut control. Full is the production pipeline.
enum class TrainMode {
    Full,
    NoDis,
    NoType,
    Eq2Control,
};

TrainMode parse_mode(std::string_view name);
std::string_view mode_name(TrainMode mode);

struct TrainConfig {
    int epochs = 20;
    int batch_size = 32;
    AdamConfig adam;    // lr 0.002
    ModelConfig model;  // D = 50, L = 2, dropout 0.7 / 0.1
    int distance_cap = 10;
    BanditConfig bandit;      // K0 = 0.1, S = 0.1, R = 10, K in [0.1, 2]
    int bandit_interval = 2;  // batches per reward interval
    unsigned long long seed = 1;
    double val_fraction = 0.1;   // share of training data held out for rewards
    bool reward_on_test = false;  // mirror the no-validation-split protocol
    TrainMode mode = TrainMode::Full;

    void validate() const;  // throws InputError
};

// Token-form vocabulary, built from the training split only. Id 0 is the
// reserved padding id, id 1 catches unseen forms.
class TokenVocab {
public:
    static constexpr int kPadId = 0;
    static constexpr int kUnkId = 1;

    TokenVocab();
    static TokenVocab build(const std::vector<Example>& training);
    static TokenVocab from_labels(std::vector<std::string> labels);

    int id_of(const std::string& form) const;
    int size() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    void add(const std::string& form);

    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> ids_;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;  // unweighted mean of per-class F1, 0 for undefined
    std::vector<ClassMetrics> per_class;
    std::vector<std::vector<long>> confusion;  // [true][predicted]
    long total = 0;
};

EvalReport evaluate_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                                int classes);

struct BanditTraceRow {
    int interval = 0;  // b
    double curvature = 0.0;
    int reward = 0;
    bool frozen = false;
};

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    double val_accuracy = 0.0;  // reward-split accuracy at epoch end
    double curvature = 0.0;
    EvalReport test;
};

// Per-example distance weights, recomputed whenever the bandit moves the
// curvature. Reads must present the current bandit version; a stale cache
// is an internal error, never silently used.
struct VersionedAdjacency {
    std::vector<Matrix> weights;
    long version = 0;

    const Matrix& at(size_t index, long bandit_version) const;
};

// Owns the whole optimization: vocab building, the reward split, cached
// syntactic views, the parameter/optimizer/bandit state, and the epoch loop.
class Trainer {
public:
    Trainer(Dataset data, TrainConfig cfg);

    // Runs n more epochs (the configured count when n < 0).
    void run_epochs(int n = -1);

    EvalReport evaluate_test() const;
    EvalReport evaluate_reward_split() const;

    const TrainConfig& config() const { return cfg_; }
    const ModelParams& params() const { return params_; }
    const AdamState& optimizer() const { return adam_; }
    const CurvatureBandit& bandit() const { return bandit_; }
    const TokenVocab& token_vocab() const { return token_vocab_; }
    const TypeVocab& type_vocab() const { return type_vocab_; }
    const std::vector<BanditTraceRow>& trace() const { return trace_; }
    const std::vector<EpochStats>& epoch_stats() const { return epoch_stats_; }
    int epochs_done() const { return epoch_; }

    // Checkpointing: a snapshot restores training bit-compatibly on the
    // same platform given the same dataset.
    struct Snapshot {
        TrainConfig config;
        int epoch = 0;
        long long global_batch = 0;
        std::string rng_state;
        std::vector<std::string> token_vocab;
        std::vector<std::string> type_vocab;
        ModelParams params;
        AdamState adam;
        double curvature = 0.0;
        int bandit_intervals = 0;
        bool bandit_frozen = false;
        std::optional<double> bandit_last_accuracy;
        std::vector<int> bandit_history;
        std::vector<BanditTraceRow> trace;
        std::vector<EpochStats> epoch_stats;
    };

    Snapshot snapshot() const;
    Trainer(Dataset data, const Snapshot& snap);

private:
    struct SplitData {
        std::vector<EncodedExample> examples;
        std::vector<IntGrid> distances;
        VersionedAdjacency cache;
    };

    void setup(Dataset&& data);
    void rebuild_distance_caches();
    EvalReport evaluate_split(const SplitData& split) const;
    DistanceFnConfig distance_config() const;
    GraphComposition composition() const;
    EncodedExample encode(const Example& ex) const;

    TrainConfig cfg_;
    std::mt19937_64 rng_;
    TokenVocab token_vocab_;
    TypeVocab type_vocab_;
    SplitData train_;
    SplitData val_;
    SplitData test_;
    bool reward_is_test_ = false;
    ModelParams params_;
    AdamState adam_;
    CurvatureBandit bandit_;
    long bandit_version_ = 0;
    long long global_batch_ = 0;
    int epoch_ = 0;
    std::vector<BanditTraceRow> trace_;
    std::vector<EpochStats> epoch_stats_;
};

// Convenience wrapper: construct, run the configured epochs, evaluate.
struct TrainResult {
    ModelParams params;
    std::vector<EpochStats> epochs;
    std::vector<BanditTraceRow> trace;
    EvalReport final_report;
    double final_curvature = 0.0;
    bool bandit_frozen = false;
};

TrainResult train(const Dataset& data, const TrainConfig& cfg);

// Runs the pipeline with the requested ablation; identical otherwise.
TrainResult ablate(const Dataset& data, TrainConfig cfg, TrainMode mode);

}  // namespace rdgcn
