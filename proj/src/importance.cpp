#include "rdgcn/importance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rdgcn/error.hpp"

namespace rdgcn {

DistanceVariant parse_variant(std::string_view name) {
    if (name == "combined") return DistanceVariant::Combined;
    if (name == "linear_cut") return DistanceVariant::LinearCut;
    if (name == "power_only") return DistanceVariant::PowerOnly;
    if (name == "exp_only") return DistanceVariant::ExpOnly;
    throw InputError("unknown distance variant '" + std::string(name) + "'");
}

std::string_view variant_name(DistanceVariant variant) {
    switch (variant) {
        case DistanceVariant::Combined: return "combined";
        case DistanceVariant::LinearCut: return "linear_cut";
        case DistanceVariant::PowerOnly: return "power_only";
        case DistanceVariant::ExpOnly: return "exp_only";
    }
    return "unknown";
}

void DistanceFnConfig::validate() const {
    if (cap < 1) throw InputError("distance bound T must be >= 1");
    if (!(curvature > 0.0)) throw InputError("curvature K must be > 0");
    if (variant == DistanceVariant::LinearCut && curvature > cap) {
        throw InputError("linear_cut slope K must be <= T");
    }
}

namespace {

void check_domain(int distance, const DistanceFnConfig& cfg) {
    if (distance < 0 || distance > cfg.cap) {
        throw InputError("distance " + std::to_string(distance) + " outside [0, " +
                         std::to_string(cfg.cap) + "]");
    }
}

}  // namespace

double imp_linear_cut(int distance, const DistanceFnConfig& cfg) {
    check_domain(distance, cfg);
    if (distance < cfg.curvature) return 1.0 - distance / cfg.curvature;
    return 0.0;
}

double imp_power(int distance, const DistanceFnConfig& cfg) {
    check_domain(distance, cfg);
    if (distance == 0) return 1.0;
    return 1.0 - std::pow(static_cast<double>(distance) / cfg.cap, cfg.cap);
}

double imp_exp(int distance, const DistanceFnConfig& cfg) {
    check_domain(distance, cfg);
    return std::exp(-cfg.curvature * distance);
}

double imp_dis(int distance, const DistanceFnConfig& cfg) {
    switch (cfg.variant) {
        case DistanceVariant::Combined: return imp_power(distance, cfg) * imp_exp(distance, cfg);
        case DistanceVariant::LinearCut: return imp_linear_cut(distance, cfg);
        case DistanceVariant::PowerOnly: return imp_power(distance, cfg);
        case DistanceVariant::ExpOnly: return imp_exp(distance, cfg);
    }
    throw InternalError("unhandled distance variant");
}

Matrix distance_adjacency(const IntGrid& dist, const DistanceFnConfig& cfg) {
    // Tree distances are few; evaluate each value once.
    std::vector<double> table(static_cast<size_t>(cfg.cap) + 1);
    for (int t = 0; t <= cfg.cap; ++t) table[t] = imp_dis(t, cfg);

    Matrix out(dist.n, dist.n);
    for (int i = 0; i < dist.n; ++i) {
        for (int j = 0; j < dist.n; ++j) {
            const int d = dist.at(i, j);
            if (d < 0 || d > cfg.cap) {
                throw InputError("distance matrix entry " + std::to_string(d) + " outside [0, " +
                                 std::to_string(cfg.cap) + "]");
            }
            out(i, j) = table[d];
        }
    }
    return out;
}

TypeAttention type_attention(const Matrix& type_feats, const Matrix& query) {
    const Matrix logits = matmul(type_feats, query);  // U x 1
    if (!all_finite(logits)) throw InternalError("non-finite type-attention logits");
    TypeAttention att;
    att.logits.assign(logits.data().begin(), logits.data().end());
    const double peak = *std::max_element(att.logits.begin(), att.logits.end());
    att.probs.resize(att.logits.size());
    double total = 0.0;
    for (size_t u = 0; u < att.logits.size(); ++u) {
        att.probs[u] = std::exp(att.logits[u] - peak);
        total += att.probs[u];
    }
    for (double& p : att.probs) p /= total;
    return att;
}

Matrix gather_type_weights(const IntGrid& type_ids, const IntGrid& topo,
                           const std::vector<double>& probs) {
    if (type_ids.n != topo.n) throw InternalError("type/topology grids disagree on size");
    Matrix out(type_ids.n, type_ids.n);
    for (int i = 0; i < type_ids.n; ++i) {
        for (int j = 0; j < type_ids.n; ++j) {
            if (topo.at(i, j) != 1) continue;
            const int id = type_ids.at(i, j);
            if (id < 0 || id >= static_cast<int>(probs.size())) {
                throw InternalError("type id " + std::to_string(id) +
                                    " outside the attention distribution");
            }
            out(i, j) = probs[id];
        }
    }
    return out;
}

Matrix type_importance(const IntGrid& type_ids, const IntGrid& topo, const Matrix& type_feats,
                       const Matrix& query) {
    return gather_type_weights(type_ids, topo, type_attention(type_feats, query).probs);
}

Matrix merge_adjacency(const Matrix& dis_weights, const Matrix& type_weights) {
    if (!dis_weights.same_shape(type_weights)) {
        throw InputError("cannot merge adjacency matrices of different shapes");
    }
    Matrix merged = dis_weights;
    axpy(merged, 1.0, type_weights);
    return merged;
}

std::vector<std::pair<int, double>> emit_curve(const DistanceFnConfig& cfg) {
    cfg.validate();
    std::vector<std::pair<int, double>> samples;
    samples.reserve(static_cast<size_t>(cfg.cap) + 1);
    for (int t = 0; t <= cfg.cap; ++t) samples.emplace_back(t, imp_dis(t, cfg));
    return samples;
}

}  // namespace rdgcn
