#include "rdgcn/synthetic.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>

#include "rdgcn/error.hpp"

namespace rdgcn {

namespace {

// Aspect words carry a soft sentiment prior (review corpora skew the same
// way: some aspects are praised far more often than others). Each label
// draws its aspect from the matching bucket with probability 0.7. The prior
// gives training a reliable early accuracy ramp at any curvature; the
// residual 30% is only separable through the opinion word in the graph.
const std::array<std::array<const char*, 3>, 3> kAspects = {{
    {"service", "battery", "wait"},    // negative-leaning
    {"menu", "laptop", "interior"},    // neutral-leaning
    {"food", "staff", "pizza"},        // positive-leaning
}};
const std::array<const char*, 3> kPositive = {"great", "excellent", "tasty"};
const std::array<const char*, 3> kNegative = {"dreadful", "terrible", "awful"};
const std::array<const char*, 3> kNeutral = {"okay", "average", "ordinary"};

// Sentences close with a short mood word deep in the tree ("... would come
// back", "... total regret"). It echoes the true polarity from five edges
// out, past every two-hop horizon.
const std::array<std::array<const char*, 3>, 3> kEchoes = {{
    {"regret", "complained", "returned"},
    {"fine", "acceptable", "usual"},
    {"loved", "recommended", "enjoyed"},
}};
const std::array<const char*, 30> kFiller = {
    "the",   "a",    "was",   "but",    "and",   "with",  "very",  "quite", "this",  "that",
    "came",  "order", "table", "day",   "time",  "place", "thing", "one",   "two",   "really",
    "there", "then",  "after", "before", "again", "still", "today", "here",  "maybe", "though"};

const std::array<const char*, 8> kEdgeLabels = {"det",  "nsubj", "obj", "advmod",
                                                "nmod", "case",  "cc",  "punct"};
const std::array<const char*, 3> kNegators = {"not", "never", "hardly"};

// Flipped sentences spell the opinion with the mirror-polarity word plus a
// negator two edges behind it ("never quite great"). Resolving them needs
// the token at tree distance 3 from the aspect, one hop past what two
// unweighted aggregation layers can reach.
constexpr double kFlipRate = 0.3;
constexpr double kPolarityNoiseRate = 0.15;
constexpr double kAspectPriorRate = 0.7;

struct Edge {
    int a;
    int b;
    std::string deprel;
};

template <typename Pool>
const char* pick(const Pool& pool, std::mt19937_64& rng) {
    std::uniform_int_distribution<size_t> at(0, pool.size() - 1);
    return pool[at(rng)];
}

Example make_example(int label, int tokens, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Negation needs the opinion plus a two-node tail; only pos/neg labels
    // flip, and only when the sentence has room for the tail and the echo.
    const bool flipped = label != 1 && unit(rng) < kFlipRate;
    if (flipped) tokens = std::max(tokens, 8);

    // Node 0 is the aspect. The chain to the distractor pins its tree
    // distance at exactly 4; the opinion either rides the chain (the only
    // option for the 5-node minimum) or hangs directly off the aspect.
    std::vector<std::string> words(tokens);
    std::vector<Edge> edges;
    std::vector<int> aspect_dist(tokens, -1);

    // The side layout spends one extra node; thread the opinion into the
    // chain whenever the sentence is too small for it.
    const int side_minimum = flipped ? 9 : 7;
    const bool thread_opinion = tokens < side_minimum || (rng() & 1u) == 0;
    const int aspect = 0;
    aspect_dist[aspect] = 0;
    int opinion;
    std::vector<int> chain;  // aspect .. distractor, 5 nodes
    int next = 1;
    if (thread_opinion) {
        opinion = next++;
        chain = {aspect, opinion, next, next + 1, next + 2};
        next += 3;
    } else {
        opinion = next++;
        aspect_dist[opinion] = 1;
        chain = {aspect, next, next + 1, next + 2, next + 3};
        next += 4;
        edges.push_back({aspect, opinion, pick(kEdgeLabels, rng)});
    }
    const int distractor = chain.back();
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        aspect_dist[chain[i + 1]] = static_cast<int>(i) + 1;
        edges.push_back({chain[i], chain[i + 1], pick(kEdgeLabels, rng)});
    }

    int negator = -1;
    if (flipped) {
        const int mid = next++;
        negator = next++;
        aspect_dist[mid] = 2;
        aspect_dist[negator] = 3;
        edges.push_back({opinion, mid, pick(kEdgeLabels, rng)});
        edges.push_back({mid, negator, pick(kEdgeLabels, rng)});
        words[mid] = pick(kFiller, rng);
        words[negator] = pick(kNegators, rng);
    }

    int echo = -1;
    if (next < tokens) {
        echo = next++;
        aspect_dist[echo] = 5;
        edges.push_back({distractor, echo, pick(kEdgeLabels, rng)});
        words[echo] = pick(kEchoes[label], rng);
    }

    // Fillers never attach to the aspect itself, so the opinion stays the
    // only polarity-bearing word at distance 1.
    while (next < tokens) {
        std::uniform_int_distribution<int> anchor_of(1, next - 1);
        const int anchor = anchor_of(rng);
        aspect_dist[next] = aspect_dist[anchor] + 1;
        edges.push_back({anchor, next, pick(kEdgeLabels, rng)});
        ++next;
    }

    const int aspect_bucket =
        unit(rng) < kAspectPriorRate ? label : static_cast<int>(rng() % kNumClasses);
    words[aspect] = pick(kAspects[aspect_bucket], rng);

    // The surface word carries the mirrored polarity when negated; the
    // opinion occurrence, read with its tail, still determines the label.
    const int face = flipped ? 2 - label : label;
    switch (face) {
        case 0: words[opinion] = pick(kNegative, rng); break;
        case 1: words[opinion] = pick(kNeutral, rng); break;
        case 2: words[opinion] = pick(kPositive, rng); break;
        default: throw InternalError("label out of range");
    }
    if (label == 0) {
        words[distractor] = pick(kPositive, rng);
    } else if (label == 2) {
        words[distractor] = pick(kNegative, rng);
    } else {
        words[distractor] = pick(kNeutral, rng);
    }
    // Off-opinion slots at distance >= 2 reuse sentiment vocabulary now and
    // then, the way real sentences mention "great" far from the aspect.
    for (int node = 0; node < tokens; ++node) {
        if (!words[node].empty()) continue;
        if (aspect_dist[node] >= 2 && unit(rng) < kPolarityNoiseRate) {
            const int bucket = static_cast<int>(rng() % 3);
            words[node] = bucket == 0   ? pick(kPositive, rng)
                          : bucket == 1 ? pick(kNegative, rng)
                                        : pick(kNeutral, rng);
        } else {
            words[node] = pick(kFiller, rng);
        }
    }

    // Random surface order, then orient edges away from a random root.
    std::vector<int> position(tokens);
    for (int i = 0; i < tokens; ++i) position[i] = i;
    std::shuffle(position.begin(), position.end(), rng);

    std::vector<std::vector<std::pair<int, const Edge*>>> adjacent(tokens);
    for (const Edge& e : edges) {
        adjacent[e.a].push_back({e.b, &e});
        adjacent[e.b].push_back({e.a, &e});
    }
    std::uniform_int_distribution<int> root_of(0, tokens - 1);
    const int root = root_of(rng);
    std::vector<int> parent(tokens, -1);
    std::vector<const Edge*> parent_edge(tokens, nullptr);
    std::vector<int> stack = {root};
    std::vector<bool> seen(tokens, false);
    seen[root] = true;
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        for (auto [peer, edge] : adjacent[node]) {
            if (seen[peer]) continue;
            seen[peer] = true;
            parent[peer] = node;
            parent_edge[peer] = edge;
            stack.push_back(peer);
        }
    }

    Example ex;
    ex.tree.tokens.resize(tokens);
    for (int node = 0; node < tokens; ++node) {
        Token& tok = ex.tree.tokens[position[node]];
        tok.index = position[node] + 1;
        tok.form = words[node];
        if (node == root) {
            tok.head = 0;
            tok.deprel = "root";
        } else {
            tok.head = position[parent[node]] + 1;
            tok.deprel = parent_edge[node]->deprel;
        }
    }
    ex.aspect_begin = position[aspect];
    ex.aspect_end = position[aspect] + 1;
    ex.label = label;
    return ex;
}

std::vector<Example> make_split(int count, const SyntheticConfig& cfg, std::mt19937_64& rng) {
    std::vector<Example> out;
    out.reserve(count);
    std::uniform_int_distribution<int> size_of(cfg.min_tokens, cfg.max_tokens);
    for (int i = 0; i < count; ++i) {
        out.push_back(make_example(i % kNumClasses, size_of(rng), rng));
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

}  // namespace

Dataset make_synthetic_corpus(const SyntheticConfig& cfg) {
    if (cfg.train_size < kNumClasses || cfg.test_size < 1) {
        throw InputError("synthetic corpus sizes too small");
    }
    if (cfg.min_tokens < 5 || cfg.max_tokens < cfg.min_tokens) {
        throw InputError("synthetic sentences need at least 5 tokens");
    }
    std::mt19937_64 rng(cfg.seed);
    Dataset data;
    data.train = make_split(cfg.train_size, cfg, rng);
    data.test = make_split(cfg.test_size, cfg, rng);
    return data;
}

}  // namespace rdgcn
