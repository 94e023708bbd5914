#include "rdgcn/graph.hpp"

#include <algorithm>
#include <queue>

#include "rdgcn/error.hpp"

namespace rdgcn {

TypeVocab::TypeVocab() {
    add("<root>");
    add("<none>");
}

void TypeVocab::add(const std::string& deprel) {
    if (ids_.contains(deprel)) return;
    ids_.emplace(deprel, static_cast<int>(labels_.size()));
    labels_.push_back(deprel);
}

TypeVocab TypeVocab::build_from_trees(const std::vector<DepTree>& trees) {
    TypeVocab vocab;
    for (const DepTree& tree : trees) {
        for (const Token& tok : tree.tokens) {
            if (tok.head != 0) vocab.add(tok.deprel);  // the ROOT edge is dropped
        }
    }
    return vocab;
}

TypeVocab TypeVocab::build(const std::vector<Example>& training) {
    TypeVocab vocab;
    for (const Example& ex : training) {
        for (const Token& tok : ex.tree.tokens) {
            if (tok.head != 0) vocab.add(tok.deprel);
        }
    }
    return vocab;
}

TypeVocab TypeVocab::from_labels(std::vector<std::string> labels) {
    if (labels.size() < 2 || labels[kRootId] != "<root>" || labels[kNoneId] != "<none>") {
        throw InputError("type vocabulary must start with <root>, <none>");
    }
    TypeVocab vocab;
    for (size_t i = 2; i < labels.size(); ++i) vocab.add(labels[i]);
    if (vocab.labels_ != labels) throw InputError("type vocabulary contains duplicate labels");
    return vocab;
}

int TypeVocab::id_of(const std::string& deprel) const {
    auto it = ids_.find(deprel);
    return it == ids_.end() ? kNoneId : it->second;
}

namespace {

std::vector<std::vector<int>> undirected_edges(const DepTree& tree) {
    std::vector<std::vector<int>> adj(tree.size());
    for (const Token& tok : tree.tokens) {
        if (tok.head == 0) continue;
        adj[tok.index - 1].push_back(tok.head - 1);
        adj[tok.head - 1].push_back(tok.index - 1);
    }
    return adj;
}

}  // namespace

IntGrid min_tree_distances(const DepTree& tree, int cap) {
    if (cap < 1) throw InputError("distance cap must be >= 1");
    const int n = tree.size();
    const auto adj = undirected_edges(tree);
    IntGrid dist(n, -1);
    std::queue<int> frontier;
    for (int src = 0; src < n; ++src) {
        dist.at(src, src) = 0;
        frontier.push(src);
        while (!frontier.empty()) {
            const int cur = frontier.front();
            frontier.pop();
            for (int next : adj[cur]) {
                if (dist.at(src, next) < 0) {
                    dist.at(src, next) = dist.at(src, cur) + 1;
                    frontier.push(next);
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int& d = dist.at(i, j);
            if (d < 0) throw InternalError("dependency tree is disconnected");
            d = std::min(d, cap);
        }
    }
    return dist;
}

IntGrid build_type_matrix(const DepTree& tree, const TypeVocab& vocab) {
    const int n = tree.size();
    IntGrid types(n, TypeVocab::kNoneId);
    for (int i = 0; i < n; ++i) types.at(i, i) = TypeVocab::kRootId;
    for (const Token& tok : tree.tokens) {
        if (tok.head == 0) continue;
        const int id = vocab.id_of(tok.deprel);
        types.at(tok.index - 1, tok.head - 1) = id;
        types.at(tok.head - 1, tok.index - 1) = id;
    }
    return types;
}

IntGrid build_topology_mask(const DepTree& tree) {
    const int n = tree.size();
    IntGrid topo(n, 0);
    for (int i = 0; i < n; ++i) topo.at(i, i) = 1;
    for (const Token& tok : tree.tokens) {
        if (tok.head == 0) continue;
        topo.at(tok.index - 1, tok.head - 1) = 1;
        topo.at(tok.head - 1, tok.index - 1) = 1;
    }
    return topo;
}

SyntacticViews build_views(const DepTree& tree, const TypeVocab& vocab, int cap) {
    return SyntacticViews{
        min_tree_distances(tree, cap),
        build_type_matrix(tree, vocab),
        build_topology_mask(tree),
    };
}

}  // namespace rdgcn
