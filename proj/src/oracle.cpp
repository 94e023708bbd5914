#include "rdgcn/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "rdgcn/error.hpp"
#include "rdgcn/model.hpp"

namespace rdgcn {

IntGrid floyd_warshall_distances(const DepTree& tree, int cap) {
    const int n = tree.size();
    const int inf = n + 1;  // any unreachable marker beyond the longest path
    IntGrid dist(n, inf);
    for (int i = 0; i < n; ++i) dist.at(i, i) = 0;
    for (const Token& tok : tree.tokens) {
        if (tok.head == 0) continue;
        dist.at(tok.index - 1, tok.head - 1) = 1;
        dist.at(tok.head - 1, tok.index - 1) = 1;
    }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                dist.at(i, j) = std::min(dist.at(i, j), dist.at(i, k) + dist.at(k, j));
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (dist.at(i, j) >= inf) throw InternalError("dependency tree is disconnected");
            dist.at(i, j) = std::min(dist.at(i, j), cap);
        }
    }
    return dist;
}

DepTree random_valid_tree(int tokens, std::mt19937_64& rng) {
    static const char* kDeprels[] = {"nsubj", "obj", "det", "amod", "advmod", "nmod", "case"};
    std::uniform_int_distribution<int> head_of(0, tokens);
    std::uniform_int_distribution<size_t> deprel_of(0, std::size(kDeprels) - 1);
    while (true) {
        DepTree tree;
        for (int i = 1; i <= tokens; ++i) {
            Token tok;
            tok.index = i;
            tok.form = "t" + std::to_string(i);
            do {
                tok.head = head_of(rng);
            } while (tok.head == i);
            tok.deprel = tok.head == 0 ? "root" : kDeprels[deprel_of(rng)];
            tree.tokens.push_back(std::move(tok));
        }
        if (!validate_tree(tree)) return tree;
    }
}

DistOracleReport run_distance_oracle(const DistOracleOptions& opts) {
    if (opts.max_tokens < 1 || opts.trials < 1 || opts.cap < 1) {
        throw InputError("oracle sizes must be >= 1");
    }
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> size_of(1, opts.max_tokens);
    DistOracleReport report;
    for (int trial = 0; trial < opts.trials; ++trial) {
        const DepTree tree = random_valid_tree(size_of(rng), rng);
        IntGrid bfs = min_tree_distances(tree, opts.cap);
        if (opts.inject_off_by_one && tree.size() > 1) bfs.at(0, tree.size() - 1) += 1;
        const IntGrid reference = floyd_warshall_distances(tree, opts.cap);
        ++report.trials;
        if (bfs != reference) {
            ++report.mismatches;
            if (report.first_mismatch.empty()) {
                for (int i = 0; i < tree.size() && report.first_mismatch.empty(); ++i) {
                    for (int j = 0; j < tree.size(); ++j) {
                        if (bfs.at(i, j) != reference.at(i, j)) {
                            report.first_mismatch =
                                "trial " + std::to_string(trial) + ": dist[" + std::to_string(i) +
                                "][" + std::to_string(j) + "] = " + std::to_string(bfs.at(i, j)) +
                                ", reference " + std::to_string(reference.at(i, j));
                            break;
                        }
                    }
                }
            }
        }
    }
    return report;
}

namespace {

struct GradCheckInstance {
    std::vector<EncodedExample> examples;
    std::vector<Matrix> dis_weights;
    ModelParams params;
    ModelConfig model_cfg;
};

GradCheckInstance make_instance(const GradCheckOptions& opts, std::mt19937_64& rng) {
    GradCheckInstance inst;
    inst.model_cfg.embed_dim = opts.embed_dim;
    inst.model_cfg.hidden_dim = opts.hidden_dim;
    inst.model_cfg.layers = opts.layers;
    inst.model_cfg.dropout_in = 0.0;
    inst.model_cfg.dropout_out = 0.0;

    std::vector<DepTree> trees;
    std::uniform_int_distribution<int> size_of(2, opts.max_tokens);
    for (int e = 0; e < opts.examples; ++e) trees.push_back(random_valid_tree(size_of(rng), rng));
    const TypeVocab vocab = TypeVocab::build_from_trees(trees);

    const int token_vocab = 2 + opts.max_tokens;  // "t1".."tN" plus pad/unk slots
    DistanceFnConfig dist_cfg{.cap = 10, .curvature = 0.5, .variant = DistanceVariant::Combined};

    std::uniform_int_distribution<int> label_of(0, inst.model_cfg.classes - 1);
    for (const DepTree& tree : trees) {
        EncodedExample ex;
        for (const Token& tok : tree.tokens) {
            ex.token_ids.push_back(2 + (tok.index - 1) % opts.max_tokens);
        }
        std::uniform_int_distribution<int> begin_of(0, tree.size() - 1);
        ex.aspect_begin = begin_of(rng);
        ex.aspect_end = std::min(tree.size(), ex.aspect_begin + 1 + (label_of(rng) % 2));
        ex.label = label_of(rng);
        ex.type_ids = build_type_matrix(tree, vocab);
        ex.topo = build_topology_mask(tree);
        inst.examples.push_back(std::move(ex));
        inst.dis_weights.push_back(distance_adjacency(min_tree_distances(tree, dist_cfg.cap), dist_cfg));
    }
    inst.params = ModelParams::init(token_vocab, vocab.size(), inst.model_cfg, rng);
    return inst;
}

double batch_loss(const GradCheckInstance& inst, std::mt19937_64& rng) {
    double total = 0.0;
    for (size_t e = 0; e < inst.examples.size(); ++e) {
        total += forward(inst.examples[e], inst.dis_weights[e], inst.params, inst.model_cfg,
                         GraphComposition::Full, false, rng)
                     .loss;
    }
    return total / static_cast<double>(inst.examples.size());
}

}  // namespace

GradCheckReport run_grad_check(const GradCheckOptions& opts) {
    std::mt19937_64 rng(opts.seed);
    GradCheckInstance inst = make_instance(opts, rng);

    Gradients analytic = Gradients::zeros_like(inst.params);
    for (size_t e = 0; e < inst.examples.size(); ++e) {
        const ForwardCache cache = forward(inst.examples[e], inst.dis_weights[e], inst.params,
                                           inst.model_cfg, GraphComposition::Full, false, rng);
        backward(inst.examples[e], inst.dis_weights[e], cache, inst.params, inst.model_cfg,
                 GraphComposition::Full, analytic);
    }
    analytic.scale(1.0 / static_cast<double>(inst.examples.size()));
    if (opts.inject_error) analytic.clf_bias(0, 0) += 1e-2;

    GradCheckReport report;
    std::vector<Matrix*> param_tensors;
    std::vector<Matrix*> grad_tensors;
    std::vector<std::string> names;
    inst.params.for_each([&](const std::string& name, Matrix& m) {
        param_tensors.push_back(&m);
        names.push_back(name);
    });
    analytic.for_each([&](const std::string&, Matrix& m) { grad_tensors.push_back(&m); });

    for (size_t t = 0; t < param_tensors.size(); ++t) {
        ParamGradError entry{names[t], 0.0};
        Matrix& tensor = *param_tensors[t];
        for (size_t i = 0; i < tensor.size(); ++i) {
            const double original = tensor.data()[i];
            tensor.data()[i] = original + opts.fd_step;
            const double up = batch_loss(inst, rng);
            tensor.data()[i] = original - opts.fd_step;
            const double down = batch_loss(inst, rng);
            tensor.data()[i] = original;
            const double fd = (up - down) / (2.0 * opts.fd_step);
            const double analytic_value = grad_tensors[t]->data()[i];
            const double denom = std::max({std::abs(fd), std::abs(analytic_value), 0.01});
            entry.max_rel_error = std::max(entry.max_rel_error, std::abs(fd - analytic_value) / denom);
        }
        report.worst = std::max(report.worst, entry.max_rel_error);
        report.per_param.push_back(std::move(entry));
    }
    report.passed = report.worst < opts.tolerance;
    return report;
}

}  // namespace rdgcn
