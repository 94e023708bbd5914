#include "rdgcn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rdgcn/error.hpp"

namespace rdgcn {

TrainMode parse_mode(std::string_view name) {
    if (name == "full") return TrainMode::Full;
    if (name == "no_dis") return TrainMode::NoDis;
    if (name == "no_type") return TrainMode::NoType;
    if (name == "eq2_control") return TrainMode::Eq2Control;
    throw InputError("unknown mode '" + std::string(name) + "'");
}

std::string_view mode_name(TrainMode mode) {
    switch (mode) {
        case TrainMode::Full: return "full";
        case TrainMode::NoDis: return "no_dis";
        case TrainMode::NoType: return "no_type";
        case TrainMode::Eq2Control: return "eq2_control";
    }
    return "unknown";
}

void TrainConfig::validate() const {
    if (epochs < 1) throw InputError("epochs must be >= 1");
    if (batch_size < 1) throw InputError("batch size must be >= 1");
    if (bandit_interval < 1) throw InputError("bandit interval must be >= 1");
    if (distance_cap < 1) throw InputError("distance bound T must be >= 1");
    if (!(adam.lr > 0.0)) throw InputError("learning rate must be > 0");
    if (!(val_fraction > 0.0 && val_fraction <= 0.5)) {
        throw InputError("validation fraction must lie in (0, 0.5]");
    }
    model.validate();
    bandit.validate();
    if (mode == TrainMode::Eq2Control && bandit.k_max > distance_cap) {
        throw InputError("linear_cut control requires the slope range within [0, T]");
    }
}

TokenVocab::TokenVocab() {
    add("<pad>");
    add("<unk>");
}

void TokenVocab::add(const std::string& form) {
    if (ids_.contains(form)) return;
    ids_.emplace(form, static_cast<int>(labels_.size()));
    labels_.push_back(form);
}

TokenVocab TokenVocab::build(const std::vector<Example>& training) {
    TokenVocab vocab;
    for (const Example& ex : training) {
        for (const Token& tok : ex.tree.tokens) vocab.add(tok.form);
    }
    return vocab;
}

TokenVocab TokenVocab::from_labels(std::vector<std::string> labels) {
    if (labels.size() < 2 || labels[kPadId] != "<pad>" || labels[kUnkId] != "<unk>") {
        throw InputError("token vocabulary must start with <pad>, <unk>");
    }
    TokenVocab vocab;
    for (size_t i = 2; i < labels.size(); ++i) vocab.add(labels[i]);
    if (vocab.labels_ != labels) throw InputError("token vocabulary contains duplicate labels");
    return vocab;
}

int TokenVocab::id_of(const std::string& form) const {
    auto it = ids_.find(form);
    return it == ids_.end() ? kUnkId : it->second;
}

EvalReport evaluate_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                                int classes) {
    if (truth.empty()) throw InputError("cannot evaluate an empty split");
    if (truth.size() != predicted.size()) throw InternalError("prediction count mismatch");

    EvalReport report;
    report.total = static_cast<long>(truth.size());
    report.confusion.assign(classes, std::vector<long>(classes, 0));
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 || predicted[i] >= classes) {
            throw InternalError("class id out of range in evaluation");
        }
        ++report.confusion[truth[i]][predicted[i]];
    }

    long correct = 0;
    for (int c = 0; c < classes; ++c) correct += report.confusion[c][c];
    report.accuracy = static_cast<double>(correct) / static_cast<double>(report.total);

    report.per_class.resize(classes);
    double f1_sum = 0.0;
    for (int c = 0; c < classes; ++c) {
        ClassMetrics& m = report.per_class[c];
        const long tp = report.confusion[c][c];
        long support = 0;
        long predicted_c = 0;
        for (int j = 0; j < classes; ++j) {
            support += report.confusion[c][j];
            predicted_c += report.confusion[j][c];
        }
        m.support = support;
        m.precision = predicted_c > 0 ? static_cast<double>(tp) / predicted_c : 0.0;
        m.recall = support > 0 ? static_cast<double>(tp) / support : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        f1_sum += m.f1;
    }
    report.macro_f1 = f1_sum / classes;
    return report;
}

const Matrix& VersionedAdjacency::at(size_t index, long bandit_version) const {
    if (version != bandit_version) {
        throw InternalError("distance-weight cache at version " + std::to_string(version) +
                            " read under bandit version " + std::to_string(bandit_version));
    }
    return weights[index];
}

DistanceFnConfig Trainer::distance_config() const {
    return DistanceFnConfig{
        .cap = cfg_.distance_cap,
        .curvature = bandit_.curvature(),
        .variant = cfg_.mode == TrainMode::Eq2Control ? DistanceVariant::LinearCut
                                                      : DistanceVariant::Combined,
    };
}

GraphComposition Trainer::composition() const {
    switch (cfg_.mode) {
        case TrainMode::NoDis: return GraphComposition::NoDis;
        case TrainMode::NoType: return GraphComposition::NoType;
        default: return GraphComposition::Full;
    }
}

EncodedExample Trainer::encode(const Example& ex) const {
    EncodedExample enc;
    enc.token_ids.reserve(ex.tree.tokens.size());
    for (const Token& tok : ex.tree.tokens) enc.token_ids.push_back(token_vocab_.id_of(tok.form));
    enc.aspect_begin = ex.aspect_begin;
    enc.aspect_end = ex.aspect_end;
    enc.label = ex.label;
    enc.type_ids = build_type_matrix(ex.tree, type_vocab_);
    enc.topo = build_topology_mask(ex.tree);
    return enc;
}

Trainer::Trainer(Dataset data, TrainConfig cfg) : cfg_(cfg), bandit_(cfg.bandit) {
    cfg_.validate();
    setup(std::move(data));
}

void Trainer::setup(Dataset&& data) {
    if (data.train.empty()) throw InputError("training split is empty");
    if (data.test.empty()) throw InputError("test split is empty");
    for (const Example& ex : data.train) {
        if (auto violation = validate_tree(ex.tree)) {
            throw InputError(std::string("invalid training tree: ") + to_string(violation->kind));
        }
    }

    rng_.seed(cfg_.seed);

    std::vector<Example> train_examples;
    std::vector<Example> val_examples;
    reward_is_test_ = cfg_.reward_on_test;
    if (reward_is_test_) {
        train_examples = std::move(data.train);
    } else {
        if (data.train.size() < 2) throw InputError("training split too small to carve rewards");
        std::vector<size_t> order(data.train.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::shuffle(order.begin(), order.end(), rng_);
        size_t val_count = static_cast<size_t>(
            std::lround(cfg_.val_fraction * static_cast<double>(data.train.size())));
        val_count = std::clamp<size_t>(val_count, 1, data.train.size() - 1);
        for (size_t i = 0; i < order.size(); ++i) {
            (i < val_count ? val_examples : train_examples).push_back(data.train[order[i]]);
        }
    }

    std::vector<long> class_counts(cfg_.model.classes, 0);
    for (const Example& ex : train_examples) {
        if (ex.label < 0 || ex.label >= cfg_.model.classes) {
            throw InputError("label id " + std::to_string(ex.label) + " out of range");
        }
        ++class_counts[ex.label];
    }
    for (int c = 0; c < cfg_.model.classes; ++c) {
        if (class_counts[c] == 0) {
            throw InputError("class '" + std::string(polarity_name(c)) +
                             "' missing from the training split");
        }
    }

    token_vocab_ = TokenVocab::build(train_examples);
    type_vocab_ = TypeVocab::build(train_examples);

    auto fill_split = [&](SplitData& split, const std::vector<Example>& examples) {
        split.examples.clear();
        split.distances.clear();
        for (const Example& ex : examples) {
            split.examples.push_back(encode(ex));
            split.distances.push_back(min_tree_distances(ex.tree, cfg_.distance_cap));
        }
    };
    fill_split(train_, train_examples);
    fill_split(val_, val_examples);
    fill_split(test_, data.test);

    params_ = ModelParams::init(token_vocab_.size(), type_vocab_.size(), cfg_.model, rng_);
    adam_ = AdamState::init(params_);
    rebuild_distance_caches();
}

void Trainer::rebuild_distance_caches() {
    const DistanceFnConfig dist_cfg = distance_config();
    const bool swap_for_topology = composition() == GraphComposition::NoDis;
    auto rebuild = [&](SplitData& split) {
        split.cache.weights.clear();
        split.cache.weights.reserve(split.examples.size());
        for (size_t i = 0; i < split.examples.size(); ++i) {
            if (swap_for_topology) {
                const IntGrid& topo = split.examples[i].topo;
                Matrix w(topo.n, topo.n);
                for (int r = 0; r < topo.n; ++r) {
                    for (int c = 0; c < topo.n; ++c) w(r, c) = topo.at(r, c);
                }
                split.cache.weights.push_back(std::move(w));
            } else {
                split.cache.weights.push_back(distance_adjacency(split.distances[i], dist_cfg));
            }
        }
        split.cache.version = bandit_version_;
    };
    rebuild(train_);
    rebuild(val_);
    rebuild(test_);
}

EvalReport Trainer::evaluate_split(const SplitData& split) const {
    std::vector<int> truth;
    std::vector<int> predicted;
    truth.reserve(split.examples.size());
    predicted.reserve(split.examples.size());
    std::mt19937_64 unused(0);  // dropout is off at eval; no draws happen
    for (size_t i = 0; i < split.examples.size(); ++i) {
        const EncodedExample& ex = split.examples[i];
        const ForwardCache cache = forward(ex, split.cache.at(i, bandit_version_), params_,
                                           cfg_.model, composition(), false, unused);
        truth.push_back(ex.label);
        predicted.push_back(cache.predicted);
    }
    return evaluate_predictions(truth, predicted, cfg_.model.classes);
}

EvalReport Trainer::evaluate_test() const { return evaluate_split(test_); }

EvalReport Trainer::evaluate_reward_split() const {
    return evaluate_split(reward_is_test_ ? test_ : val_);
}

void Trainer::run_epochs(int n) {
    const int target = n < 0 ? std::max(0, cfg_.epochs - epoch_) : n;
    Gradients grads = Gradients::zeros_like(params_);
    for (int round = 0; round < target; ++round) {
        std::vector<size_t> order(train_.examples.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::shuffle(order.begin(), order.end(), rng_);

        double loss_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg_.batch_size) {
            const size_t stop = std::min(order.size(), start + cfg_.batch_size);
            try {
                grads.zero();
                for (size_t i = start; i < stop; ++i) {
                    const size_t idx = order[i];
                    const EncodedExample& ex = train_.examples[idx];
                    const Matrix& dis = train_.cache.at(idx, bandit_version_);
                    const ForwardCache cache =
                        forward(ex, dis, params_, cfg_.model, composition(), true, rng_);
                    loss_sum += cache.loss;
                    backward(ex, dis, cache, params_, cfg_.model, composition(), grads);
                }
                grads.scale(1.0 / static_cast<double>(stop - start));
                grads.check_finite();
                adam_step(params_, grads, adam_, cfg_.adam);
            } catch (const InternalError& e) {
                throw InternalError("epoch " + std::to_string(epoch_ + 1) + ", batch " +
                                    std::to_string(start / cfg_.batch_size + 1) + ": " + e.what());
            }
            ++global_batch_;

            if (global_batch_ % cfg_.bandit_interval == 0 && !bandit_.frozen()) {
                const double accuracy = evaluate_reward_split().accuracy;
                const int reward = bandit_.reward(accuracy);
                bandit_.step(reward);
                ++bandit_version_;
                trace_.push_back(BanditTraceRow{bandit_.intervals(), bandit_.curvature(), reward,
                                                bandit_.frozen()});
                rebuild_distance_caches();
            }
        }

        ++epoch_;
        EpochStats stats;
        stats.epoch = epoch_;
        stats.mean_loss = loss_sum / static_cast<double>(train_.examples.size());
        stats.val_accuracy = evaluate_reward_split().accuracy;
        stats.curvature = bandit_.curvature();
        stats.test = evaluate_test();
        epoch_stats_.push_back(std::move(stats));
    }
}

Trainer::Snapshot Trainer::snapshot() const {
    Snapshot snap;
    snap.config = cfg_;
    snap.epoch = epoch_;
    snap.global_batch = global_batch_;
    std::ostringstream rng_out;
    rng_out << rng_;
    snap.rng_state = rng_out.str();
    snap.token_vocab = token_vocab_.labels();
    snap.type_vocab = type_vocab_.labels();
    snap.params = params_;
    snap.adam = adam_;
    snap.curvature = bandit_.curvature();
    snap.bandit_intervals = bandit_.intervals();
    snap.bandit_frozen = bandit_.frozen();
    snap.bandit_last_accuracy = bandit_.last_accuracy();
    snap.bandit_history.assign(bandit_.history().begin(), bandit_.history().end());
    snap.trace = trace_;
    snap.epoch_stats = epoch_stats_;
    return snap;
}

Trainer::Trainer(Dataset data, const Snapshot& snap) : Trainer(std::move(data), snap.config) {
    if (token_vocab_.labels() != snap.token_vocab || type_vocab_.labels() != snap.type_vocab) {
        throw InputError("checkpoint vocabularies do not match the supplied dataset");
    }
    bool shapes_ok = true;
    size_t field = 0;
    std::vector<const Matrix*> restored;
    snap.params.for_each([&](const std::string&, const Matrix& m) { restored.push_back(&m); });
    params_.for_each([&](const std::string&, const Matrix& m) {
        if (field >= restored.size() || !m.same_shape(*restored[field])) shapes_ok = false;
        ++field;
    });
    if (!shapes_ok || field != restored.size()) {
        throw InputError("checkpoint parameter shapes do not match the configuration");
    }

    params_ = snap.params;
    adam_ = snap.adam;
    bandit_.restore(snap.curvature, snap.bandit_intervals, snap.bandit_frozen,
                    snap.bandit_last_accuracy,
                    std::deque<int>(snap.bandit_history.begin(), snap.bandit_history.end()));
    std::istringstream rng_in(snap.rng_state);
    rng_in >> rng_;
    if (!rng_in) throw InputError("checkpoint holds a malformed generator state");
    epoch_ = snap.epoch;
    global_batch_ = snap.global_batch;
    trace_ = snap.trace;
    epoch_stats_ = snap.epoch_stats;
    bandit_version_ = static_cast<long>(trace_.size());
    rebuild_distance_caches();
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
    Trainer trainer(data, cfg);
    trainer.run_epochs();
    TrainResult result;
    result.params = trainer.params();
    result.epochs = trainer.epoch_stats();
    result.trace = trainer.trace();
    result.final_report = trainer.evaluate_test();
    result.final_curvature = trainer.bandit().curvature();
    result.bandit_frozen = trainer.bandit().frozen();
    return result;
}

TrainResult ablate(const Dataset& data, TrainConfig cfg, TrainMode mode) {
    cfg.mode = mode;
    return train(data, cfg);
}

}  // namespace rdgcn
