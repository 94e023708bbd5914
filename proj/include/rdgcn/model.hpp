#pragma once

#include <random>
#include <string>
#include <vector>

#include "rdgcn/graph.hpp"
#include "rdgcn/importance.hpp"
#include "rdgcn/matrix.hpp"

namespace rdgcn {

struct ModelConfig {
    int embed_dim = 50;   // width of the token embedding table
    int hidden_dim = 50;  // D, GCN feature width
    int layers = 2;       // L
    int classes = kNumClasses;
    double dropout_in = 0.7;   // on gathered embeddings, training only
    double dropout_out = 0.1;  // on the pooled aspect vector, training only

    void validate() const;  // throws InputError
};

// Every trainable tensor of the pipeline.
struct ModelParams {
    Matrix embed;               // V x embed_dim token embedding table
    Matrix proj;                // embed_dim x D encoder projection
    std::vector<Matrix> gcn_w;  // L matrices, D x D
    Matrix type_feats;          // U x D dependency-type features (H)
    Matrix type_query;          // D x 1 attention query (q)
    Matrix clf_weight;          // D x C classifier (Z)
    Matrix clf_bias;            // 1 x C

    // Uniform [-0.1, 0.1] init for all trainables, in field order.
    static ModelParams init(int token_vocab, int type_vocab, const ModelConfig& cfg,
                            std::mt19937_64& rng);

    // Applies fn(name, tensor) to every trainable, in a fixed order shared
    // with Gradients and AdamState.
    template <typename Fn>
    void for_each(Fn&& fn) {
        fn(std::string("embed"), embed);
        fn(std::string("proj"), proj);
        for (size_t l = 0; l < gcn_w.size(); ++l) fn("gcn_w" + std::to_string(l + 1), gcn_w[l]);
        fn(std::string("type_H"), type_feats);
        fn(std::string("type_q"), type_query);
        fn(std::string("clf_Z"), clf_weight);
        fn(std::string("clf_b"), clf_bias);
    }
    template <typename Fn>
    void for_each(Fn&& fn) const {
        fn(std::string("embed"), embed);
        fn(std::string("proj"), proj);
        for (size_t l = 0; l < gcn_w.size(); ++l) fn("gcn_w" + std::to_string(l + 1), gcn_w[l]);
        fn(std::string("type_H"), type_feats);
        fn(std::string("type_q"), type_query);
        fn(std::string("clf_Z"), clf_weight);
        fn(std::string("clf_b"), clf_bias);
    }
};

// Same shapes as ModelParams. The bandit-controlled curvature is not a
// trainable and deliberately has no slot here.
struct Gradients {
    Matrix embed;
    Matrix proj;
    std::vector<Matrix> gcn_w;
    Matrix type_feats;
    Matrix type_query;
    Matrix clf_weight;
    Matrix clf_bias;

    static Gradients zeros_like(const ModelParams& params);
    void zero();
    void scale(double factor);

    template <typename Fn>
    void for_each(Fn&& fn) {
        fn(std::string("embed"), embed);
        fn(std::string("proj"), proj);
        for (size_t l = 0; l < gcn_w.size(); ++l) fn("gcn_w" + std::to_string(l + 1), gcn_w[l]);
        fn(std::string("type_H"), type_feats);
        fn(std::string("type_q"), type_query);
        fn(std::string("clf_Z"), clf_weight);
        fn(std::string("clf_b"), clf_bias);
    }
    template <typename Fn>
    void for_each(Fn&& fn) const {
        fn(std::string("embed"), embed);
        fn(std::string("proj"), proj);
        for (size_t l = 0; l < gcn_w.size(); ++l) fn("gcn_w" + std::to_string(l + 1), gcn_w[l]);
        fn(std::string("type_H"), type_feats);
        fn(std::string("type_q"), type_query);
        fn(std::string("clf_Z"), clf_weight);
        fn(std::string("clf_b"), clf_bias);
    }

    // Throws InternalError naming the first non-finite tensor.
    void check_finite() const;
};

struct AdamConfig {
    double lr = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Gradients first_moment;
    Gradients second_moment;
    long long steps = 0;

    static AdamState init(const ModelParams& params);
};

// Bias-corrected Adam update over every trainable; one shared step counter.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamConfig& cfg);

// How the merged adjacency is assembled. NoDis swaps the distance view for
// the raw binary topology; NoType drops the type view entirely.
enum class GraphComposition {
    Full,
    NoDis,
    NoType,
};

// One example with everything the model needs resolved to ids.
struct EncodedExample {
    std::vector<int> token_ids;
    int aspect_begin = 0;
    int aspect_end = 0;
    int label = 0;
    IntGrid type_ids;
    IntGrid topo;
};

// Everything backward() needs from one forward pass.
struct ForwardCache {
    Matrix gathered;              // N x embed_dim rows of the embedding table
    Matrix gathered_dropped;      // after input dropout
    std::vector<double> in_mask;  // inverted-dropout multipliers, empty at eval
    TypeAttention attention;      // unused under NoType
    Matrix adjacency;             // A*, N x N
    std::vector<Matrix> features;     // E^0 .. E^L
    std::vector<Matrix> preact;       // A* E^(l-1) W^l before the ReLU, per layer
    std::vector<Matrix> mixed;        // A* E^(l-1), per layer
    std::vector<double> pooled;       // f, size D
    std::vector<double> out_mask;     // empty at eval
    std::vector<double> pooled_dropped;
    std::vector<double> logits;  // size C
    std::vector<double> probs;   // softmax(logits)
    double loss = 0.0;
    int predicted = 0;
};

// Runs the pipeline on one example. dis_weights is the cached distance view
// (already composed for the active GraphComposition); it is constant with
// respect to every trainable and to the curvature. When training is true the
// two dropout masks are drawn from rng in a fixed order.
ForwardCache forward(const EncodedExample& ex, const Matrix& dis_weights,
                     const ModelParams& params, const ModelConfig& cfg, GraphComposition comp,
                     bool training, std::mt19937_64& rng);

// Accumulates d(loss of this example)/d(params) into grads.
void backward(const EncodedExample& ex, const Matrix& dis_weights, const ForwardCache& cache,
              const ModelParams& params, const ModelConfig& cfg, GraphComposition comp,
              Gradients& grads);

// Numerically stable -log softmax(logits)[label].
double cross_entropy(const std::vector<double>& logits, int label);
std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace rdgcn
