#pragma once

#include <deque>
#include <optional>

namespace rdgcn {

struct BanditConfig {
    double initial_k = 0.1;
    double step_size = 0.1;  // S, amount added or subtracted per action
    double k_min = 0.1;
    double k_max = 2.0;
    int window = 10;  // R, number of historical rewards in the stop test

    void validate() const;  // throws InputError
};

// Two-armed bandit over the exponential curvature: the only actions are
// K += S and K -= S, picked by the sign of the +/-1 accuracy reward. The
// search stops for good once a full window of rewards sums to at most 1 in
// magnitude.
class CurvatureBandit {
public:
    CurvatureBandit() : CurvatureBandit(BanditConfig{}) {}
    explicit CurvatureBandit(BanditConfig cfg);

    double curvature() const { return curvature_; }
    bool frozen() const { return frozen_; }
    int intervals() const { return intervals_; }
    const BanditConfig& config() const { return cfg_; }
    const std::deque<int>& history() const { return history_; }
    std::optional<double> last_accuracy() const { return last_accuracy_; }

    // +1 when accuracy improved on the previous interval, -1 otherwise.
    // The very first interval has nothing to compare against and rewards +1.
    int reward(double accuracy);

    // Applies the action for one reward. No-op once frozen.
    void step(int reward);

    // True iff the window is full and |sum of the last R rewards| <= 1.
    // Before the window fills the search is by definition not converged.
    bool terminated() const;

    // Checkpoint support: rebuilds the exact search state.
    void restore(double curvature, int intervals, bool frozen, std::optional<double> last_accuracy,
                 std::deque<int> history);

private:
    BanditConfig cfg_;
    double curvature_;
    int intervals_ = 0;  // b, completed reward intervals
    bool frozen_ = false;
    std::optional<double> last_accuracy_;
    std::deque<int> history_;
};

}  // namespace rdgcn
