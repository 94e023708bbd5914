#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "rdgcn/graph.hpp"
#include "rdgcn/matrix.hpp"

namespace rdgcn {

// Which distance-importance curve to evaluate. Combined is the production
// path (power * exponential); LinearCut is the interval-concatenation
// control; the two sub-functions are exposed on their own for curve dumps.
enum class DistanceVariant {
    Combined,
    LinearCut,
    PowerOnly,
    ExpOnly,
};

DistanceVariant parse_variant(std::string_view name);
std::string_view variant_name(DistanceVariant variant);

struct DistanceFnConfig {
    int cap = 10;            // T, upper bound of clipped tree distances
    double curvature = 0.1;  // K: exponential curvature, or slope for LinearCut
    DistanceVariant variant = DistanceVariant::Combined;

    // Throws InputError when the parameters are out of range.
    void validate() const;
};

// 1 - t/K for t < K, 0 for K <= t <= T.
double imp_linear_cut(int distance, const DistanceFnConfig& cfg);
// 1 - (t/T)^T; the t = 0 case is an exact 1.
double imp_power(int distance, const DistanceFnConfig& cfg);
// e^(-K t).
double imp_exp(int distance, const DistanceFnConfig& cfg);
// Variant dispatch; Combined multiplies the power and exponential factors.
double imp_dis(int distance, const DistanceFnConfig& cfg);

// Elementwise imp_dis over a clipped distance grid. The diagonal is an
// exact 1 (distance 0).
Matrix distance_adjacency(const IntGrid& dist, const DistanceFnConfig& cfg);

// Attention weights over dependency types: probs = softmax(type_feats * query),
// kept with logits for the backward pass.
struct TypeAttention {
    std::vector<double> logits;  // U
    std::vector<double> probs;   // U, sums to 1, all > 0
};

// type_feats is U x D, query is D x 1. Throws InternalError on non-finite
// logits.
TypeAttention type_attention(const Matrix& type_feats, const Matrix& query);

// A_type*[i][j] = probs[type_ids[i][j]] where topo[i][j] = 1, else 0.
Matrix gather_type_weights(const IntGrid& type_ids, const IntGrid& topo,
                           const std::vector<double>& probs);

// Full type-importance pass: softmax attention followed by the masked gather.
Matrix type_importance(const IntGrid& type_ids, const IntGrid& topo, const Matrix& type_feats,
                       const Matrix& query);

// Elementwise sum of the two induced views; every entry lands in [0, 2].
Matrix merge_adjacency(const Matrix& dis_weights, const Matrix& type_weights);

// Samples the configured variant at integer distances 0..cap.
std::vector<std::pair<int, double>> emit_curve(const DistanceFnConfig& cfg);

}  // namespace rdgcn
