#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "rdgcn/conllu.hpp"

namespace rdgcn {

// N x N grid of small integers (distances, type ids, topology flags).
struct IntGrid {
    int n = 0;
    std::vector<int> cells;

    IntGrid() = default;
    explicit IntGrid(int n, int fill = 0) : n(n), cells(static_cast<size_t>(n) * n, fill) {}

    int& at(int i, int j) { return cells[static_cast<size_t>(i) * n + j]; }
    int at(int i, int j) const { return cells[static_cast<size_t>(i) * n + j]; }

    bool operator==(const IntGrid&) const = default;
};

// Dense dependency-type vocabulary. Ids 0 and 1 are reserved for the
// synthetic "root" (diagonal self-loops) and "none" (non-edges) types; real
// deprels follow in first-seen order over the training corpus. The
// vocabulary is frozen after build(); deprels unseen at build time map to
// kNoneId.
class TypeVocab {
public:
    static constexpr int kRootId = 0;
    static constexpr int kNoneId = 1;

    TypeVocab();

    static TypeVocab build(const std::vector<Example>& training);
    static TypeVocab build_from_trees(const std::vector<DepTree>& trees);
    static TypeVocab from_labels(std::vector<std::string> labels);

    int id_of(const std::string& deprel) const;
    int size() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    void add(const std::string& deprel);

    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> ids_;
};

// Minimum tree distances over undirected dependency edges, clipped to cap.
// Entry [i][j] is the number of edges on the unique path between tokens i
// and j, or cap when the true distance exceeds it.
IntGrid min_tree_distances(const DepTree& tree, int cap);

// Type-id view: [i][j] holds the type of the dependency joining i and j
// (both directions), kRootId on the diagonal, kNoneId elsewhere.
IntGrid build_type_matrix(const DepTree& tree, const TypeVocab& vocab);

// Binary topology mask: 1 on the diagonal and wherever an undirected
// dependency edge joins i and j.
IntGrid build_topology_mask(const DepTree& tree);

struct SyntacticViews {
    IntGrid dist;
    IntGrid type_ids;
    IntGrid topo;
};

SyntacticViews build_views(const DepTree& tree, const TypeVocab& vocab, int cap);

}  // namespace rdgcn
