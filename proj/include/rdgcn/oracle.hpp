#pragma once

#include <random>
#include <string>
#include <vector>

#include "rdgcn/conllu.hpp"
#include "rdgcn/graph.hpp"

namespace rdgcn {

// All-pairs shortest paths by Floyd-Warshall over the same undirected edge
// set, clipped to cap. Independent check for the BFS distances.
IntGrid floyd_warshall_distances(const DepTree& tree, int cap);

// Uniform head assignments filtered through validate_tree. Deprels are drawn
// from a small fixed pool; forms are "t1".."tN".
DepTree random_valid_tree(int tokens, std::mt19937_64& rng);

struct DistOracleOptions {
    int max_tokens = 12;
    int trials = 1000;
    int cap = 10;
    unsigned long long seed = 1;
    bool inject_off_by_one = false;  // negative-control hook for tests
};

struct DistOracleReport {
    int trials = 0;
    int mismatches = 0;
    std::string first_mismatch;
};

DistOracleReport run_distance_oracle(const DistOracleOptions& opts);

struct GradCheckOptions {
    int examples = 2;
    int max_tokens = 6;
    int embed_dim = 8;
    int hidden_dim = 8;
    int layers = 2;
    unsigned long long seed = 3;
    double fd_step = 1e-5;
    double tolerance = 1e-4;
    bool inject_error = false;  // negative-control hook for tests
};

struct ParamGradError {
    std::string name;
    double max_rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<ParamGradError> per_param;
    double worst = 0.0;
    bool passed = false;
};

// Compares analytic gradients against central finite differences of the
// batch loss on a seeded random instance, dropout disabled. The relative
// error uses a 0.01 denominator floor so near-zero gradients are judged on
// absolute error well above finite-difference noise.
GradCheckReport run_grad_check(const GradCheckOptions& opts);

}  // namespace rdgcn
