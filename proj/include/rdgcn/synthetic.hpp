#pragma once

#include <vector>

#include "rdgcn/conllu.hpp"

namespace rdgcn {

struct Dataset {
    std::vector<Example> train;
    std::vector<Example> test;
};

// Desk-scale corpus where graph distance carries the signal: every sentence
// has one aspect token, one opinion token at tree distance 1 whose polarity
// is the label, and one distractor opinion of the opposite polarity at tree
// distance 4. Remaining tokens are neutral fillers hung off the existing
// tree. Labels are balanced.
struct SyntheticConfig {
    int train_size = 2000;
    int test_size = 500;
    int min_tokens = 5;
    int max_tokens = 12;
    unsigned long long seed = 7;
};

Dataset make_synthetic_corpus(const SyntheticConfig& cfg);

}  // namespace rdgcn
