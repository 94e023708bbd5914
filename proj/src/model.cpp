#include "rdgcn/model.hpp"

#include <algorithm>
#include <cmath>

#include "rdgcn/error.hpp"

namespace rdgcn {

void ModelConfig::validate() const {
    if (embed_dim < 1 || hidden_dim < 1) throw InputError("model dimensions must be >= 1");
    if (layers < 1) throw InputError("layer count L must be >= 1");
    if (classes < 2) throw InputError("class count C must be >= 2");
    if (dropout_in < 0.0 || dropout_in >= 1.0 || dropout_out < 0.0 || dropout_out >= 1.0) {
        throw InputError("dropout rates must lie in [0, 1)");
    }
}

ModelParams ModelParams::init(int token_vocab, int type_vocab, const ModelConfig& cfg,
                              std::mt19937_64& rng) {
    cfg.validate();
    ModelParams p;
    p.embed = Matrix(token_vocab, cfg.embed_dim);
    p.proj = Matrix(cfg.embed_dim, cfg.hidden_dim);
    p.gcn_w.assign(cfg.layers, Matrix(cfg.hidden_dim, cfg.hidden_dim));
    p.type_feats = Matrix(type_vocab, cfg.hidden_dim);
    p.type_query = Matrix(cfg.hidden_dim, 1);
    p.clf_weight = Matrix(cfg.hidden_dim, cfg.classes);
    p.clf_bias = Matrix(1, cfg.classes);
    p.for_each([&](const std::string&, Matrix& m) { fill_uniform(m, -0.1, 0.1, rng); });
    return p;
}

Gradients Gradients::zeros_like(const ModelParams& params) {
    Gradients g;
    g.embed = Matrix(params.embed.rows(), params.embed.cols());
    g.proj = Matrix(params.proj.rows(), params.proj.cols());
    for (const Matrix& w : params.gcn_w) g.gcn_w.emplace_back(w.rows(), w.cols());
    g.type_feats = Matrix(params.type_feats.rows(), params.type_feats.cols());
    g.type_query = Matrix(params.type_query.rows(), params.type_query.cols());
    g.clf_weight = Matrix(params.clf_weight.rows(), params.clf_weight.cols());
    g.clf_bias = Matrix(params.clf_bias.rows(), params.clf_bias.cols());
    return g;
}

void Gradients::zero() {
    for_each([](const std::string&, Matrix& m) { m.zero(); });
}

void Gradients::scale(double factor) {
    for_each([&](const std::string&, Matrix& m) {
        for (double& v : m.data()) v *= factor;
    });
}

void Gradients::check_finite() const {
    for_each([](const std::string& name, const Matrix& m) {
        if (!all_finite(m)) throw InternalError("non-finite gradient: " + name);
    });
}

AdamState AdamState::init(const ModelParams& params) {
    AdamState state;
    state.first_moment = Gradients::zeros_like(params);
    state.second_moment = Gradients::zeros_like(params);
    return state;
}

namespace {

void adam_update(Matrix& param, const Matrix& grad, Matrix& m1, Matrix& m2, const AdamConfig& cfg,
                 double bias1, double bias2) {
    for (size_t i = 0; i < param.size(); ++i) {
        const double g = grad.data()[i];
        double& m = m1.data()[i];
        double& v = m2.data()[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m / bias1;
        const double v_hat = v / bias2;
        param.data()[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamConfig& cfg) {
    ++state.steps;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.steps));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.steps));
    adam_update(params.embed, grads.embed, state.first_moment.embed, state.second_moment.embed,
                cfg, bias1, bias2);
    adam_update(params.proj, grads.proj, state.first_moment.proj, state.second_moment.proj, cfg,
                bias1, bias2);
    for (size_t l = 0; l < params.gcn_w.size(); ++l) {
        adam_update(params.gcn_w[l], grads.gcn_w[l], state.first_moment.gcn_w[l],
                    state.second_moment.gcn_w[l], cfg, bias1, bias2);
    }
    adam_update(params.type_feats, grads.type_feats, state.first_moment.type_feats,
                state.second_moment.type_feats, cfg, bias1, bias2);
    adam_update(params.type_query, grads.type_query, state.first_moment.type_query,
                state.second_moment.type_query, cfg, bias1, bias2);
    adam_update(params.clf_weight, grads.clf_weight, state.first_moment.clf_weight,
                state.second_moment.clf_weight, cfg, bias1, bias2);
    adam_update(params.clf_bias, grads.clf_bias, state.first_moment.clf_bias,
                state.second_moment.clf_bias, cfg, bias1, bias2);
}

std::vector<double> softmax(const std::vector<double>& logits) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> probs(logits.size());
    double total = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - peak);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return probs;
}

double cross_entropy(const std::vector<double>& logits, int label) {
    if (label < 0 || label >= static_cast<int>(logits.size())) {
        throw InputError("label id " + std::to_string(label) + " out of range");
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double l : logits) total += std::exp(l - peak);
    return peak + std::log(total) - logits[label];
}

namespace {

// Inverted-dropout multipliers: 0 with probability rate, else 1/(1-rate).
std::vector<double> draw_dropout_mask(size_t n, double rate, std::mt19937_64& rng) {
    std::vector<double> mask(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& m : mask) m = unit(rng) < rate ? 0.0 : keep_scale;
    return mask;
}

}  // namespace

ForwardCache forward(const EncodedExample& ex, const Matrix& dis_weights,
                     const ModelParams& params, const ModelConfig& cfg, GraphComposition comp,
                     bool training, std::mt19937_64& rng) {
    const int n = static_cast<int>(ex.token_ids.size());
    if (n == 0) throw InternalError("empty example");
    if (ex.aspect_begin < 0 || ex.aspect_begin >= ex.aspect_end || ex.aspect_end > n) {
        throw InternalError("aspect span out of bounds");
    }
    if (dis_weights.rows() != n || dis_weights.cols() != n) {
        throw InternalError("distance weights do not match the sentence length");
    }

    ForwardCache cache;

    cache.gathered = Matrix(n, cfg.embed_dim);
    for (int i = 0; i < n; ++i) {
        const int id = ex.token_ids[i];
        if (id < 0 || id >= params.embed.rows()) {
            throw InputError("token id " + std::to_string(id) + " out of range");
        }
        for (int d = 0; d < cfg.embed_dim; ++d) cache.gathered(i, d) = params.embed(id, d);
    }

    cache.gathered_dropped = cache.gathered;
    if (training && cfg.dropout_in > 0.0) {
        cache.in_mask = draw_dropout_mask(cache.gathered.size(), cfg.dropout_in, rng);
        for (size_t i = 0; i < cache.in_mask.size(); ++i) {
            cache.gathered_dropped.data()[i] *= cache.in_mask[i];
        }
    }

    if (comp == GraphComposition::NoType) {
        cache.adjacency = dis_weights;
    } else {
        cache.attention = type_attention(params.type_feats, params.type_query);
        cache.adjacency = merge_adjacency(
            dis_weights, gather_type_weights(ex.type_ids, ex.topo, cache.attention.probs));
    }

    cache.features.reserve(cfg.layers + 1);
    cache.features.push_back(matmul(cache.gathered_dropped, params.proj));  // E^0
    for (int l = 0; l < cfg.layers; ++l) {
        cache.mixed.push_back(matmul(cache.adjacency, cache.features.back()));
        cache.preact.push_back(matmul(cache.mixed.back(), params.gcn_w[l]));
        Matrix activated = cache.preact.back();
        for (double& v : activated.data()) v = v > 0.0 ? v : 0.0;
        cache.features.push_back(std::move(activated));
    }

    const Matrix& last = cache.features.back();
    const int span = ex.aspect_end - ex.aspect_begin;
    cache.pooled.assign(cfg.hidden_dim, 0.0);
    for (int r = ex.aspect_begin; r < ex.aspect_end; ++r) {
        for (int d = 0; d < cfg.hidden_dim; ++d) cache.pooled[d] += last(r, d);
    }
    for (double& v : cache.pooled) v /= span;

    cache.pooled_dropped = cache.pooled;
    if (training && cfg.dropout_out > 0.0) {
        cache.out_mask = draw_dropout_mask(cache.pooled.size(), cfg.dropout_out, rng);
        for (size_t i = 0; i < cache.out_mask.size(); ++i) {
            cache.pooled_dropped[i] *= cache.out_mask[i];
        }
    }

    cache.logits.assign(cfg.classes, 0.0);
    for (int c = 0; c < cfg.classes; ++c) {
        double sum = params.clf_bias(0, c);
        for (int d = 0; d < cfg.hidden_dim; ++d) {
            sum += cache.pooled_dropped[d] * params.clf_weight(d, c);
        }
        cache.logits[c] = sum;
    }
    cache.probs = softmax(cache.logits);
    cache.loss = cross_entropy(cache.logits, ex.label);
    if (!std::isfinite(cache.loss)) throw InternalError("non-finite loss");
    cache.predicted = static_cast<int>(
        std::max_element(cache.probs.begin(), cache.probs.end()) - cache.probs.begin());
    return cache;
}

void backward(const EncodedExample& ex, const Matrix& dis_weights, const ForwardCache& cache,
              const ModelParams& params, const ModelConfig& cfg, GraphComposition comp,
              Gradients& grads) {
    (void)dis_weights;  // constant with respect to every trainable
    const int n = static_cast<int>(ex.token_ids.size());
    const int span = ex.aspect_end - ex.aspect_begin;

    // Classifier.
    std::vector<double> dlogits(cache.probs);
    dlogits[ex.label] -= 1.0;
    for (int c = 0; c < cfg.classes; ++c) {
        grads.clf_bias(0, c) += dlogits[c];
        for (int d = 0; d < cfg.hidden_dim; ++d) {
            grads.clf_weight(d, c) += cache.pooled_dropped[d] * dlogits[c];
        }
    }
    std::vector<double> dpooled(cfg.hidden_dim, 0.0);
    for (int d = 0; d < cfg.hidden_dim; ++d) {
        double sum = 0.0;
        for (int c = 0; c < cfg.classes; ++c) sum += dlogits[c] * params.clf_weight(d, c);
        dpooled[d] = cache.out_mask.empty() ? sum : sum * cache.out_mask[d];
    }

    // Mean pooling over the aspect rows.
    Matrix dfeat(n, cfg.hidden_dim);
    for (int r = ex.aspect_begin; r < ex.aspect_end; ++r) {
        for (int d = 0; d < cfg.hidden_dim; ++d) dfeat(r, d) = dpooled[d] / span;
    }

    // GCN layers, last to first. dA only matters when the type view is live
    // because the distance view never trains.
    const bool track_adjacency = comp != GraphComposition::NoType;
    Matrix dadj(track_adjacency ? n : 0, track_adjacency ? n : 0);
    for (int l = cfg.layers - 1; l >= 0; --l) {
        Matrix dpre = std::move(dfeat);
        for (size_t i = 0; i < dpre.size(); ++i) {
            if (cache.preact[l].data()[i] <= 0.0) dpre.data()[i] = 0.0;
        }
        axpy(grads.gcn_w[l], 1.0, matmul_tn(cache.mixed[l], dpre));
        const Matrix dmixed = matmul_nt(dpre, params.gcn_w[l]);
        if (track_adjacency) axpy(dadj, 1.0, matmul_nt(dmixed, cache.features[l]));
        dfeat = matmul_tn(cache.adjacency, dmixed);
    }

    // Type attention: scatter dA back onto the type distribution, then
    // through the softmax into H and q.
    if (track_adjacency) {
        const size_t types = cache.attention.probs.size();
        std::vector<double> dprobs(types, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (ex.topo.at(i, j) == 1) dprobs[ex.type_ids.at(i, j)] += dadj(i, j);
            }
        }
        double dot = 0.0;
        for (size_t u = 0; u < types; ++u) dot += cache.attention.probs[u] * dprobs[u];
        for (size_t u = 0; u < types; ++u) {
            const double dlogit = cache.attention.probs[u] * (dprobs[u] - dot);
            for (int d = 0; d < cfg.hidden_dim; ++d) {
                grads.type_feats(static_cast<int>(u), d) += dlogit * params.type_query(d, 0);
                grads.type_query(d, 0) += dlogit * params.type_feats(static_cast<int>(u), d);
            }
        }
    }

    // Encoder projection and the embedding gather.
    axpy(grads.proj, 1.0, matmul_tn(cache.gathered_dropped, dfeat));
    Matrix dgathered = matmul_nt(dfeat, params.proj);
    if (!cache.in_mask.empty()) {
        for (size_t i = 0; i < dgathered.size(); ++i) dgathered.data()[i] *= cache.in_mask[i];
    }
    for (int i = 0; i < n; ++i) {
        const int id = ex.token_ids[i];
        for (int d = 0; d < cfg.embed_dim; ++d) grads.embed(id, d) += dgathered(i, d);
    }
}

}  // namespace rdgcn
