#include "rdgcn/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "rdgcn/error.hpp"

namespace rdgcn {

void BanditConfig::validate() const {
    if (window < 1) throw InputError("bandit window R must be >= 1");
    if (!(step_size > 0.0)) throw InputError("bandit step S must be > 0");
    if (!(k_min > 0.0) || !(k_max >= k_min)) throw InputError("bandit curvature bounds are invalid");
    if (initial_k < k_min || initial_k > k_max) {
        throw InputError("initial curvature outside [k_min, k_max]");
    }
}

CurvatureBandit::CurvatureBandit(BanditConfig cfg) : cfg_(cfg), curvature_(cfg.initial_k) {
    cfg_.validate();
}

int CurvatureBandit::reward(double accuracy) {
    if (frozen_) throw InternalError("reward requested after the curvature search terminated");
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
        throw InputError("accuracy " + std::to_string(accuracy) + " outside [0, 1]");
    }
    const int r = (!last_accuracy_ || accuracy > *last_accuracy_) ? +1 : -1;
    last_accuracy_ = accuracy;
    return r;
}

void CurvatureBandit::step(int reward) {
    if (frozen_) return;
    if (reward != 1 && reward != -1) throw InternalError("bandit reward must be +1 or -1");
    curvature_ = std::clamp(curvature_ + reward * cfg_.step_size, cfg_.k_min, cfg_.k_max);
    history_.push_back(reward);
    while (static_cast<int>(history_.size()) > cfg_.window) history_.pop_front();
    ++intervals_;
    frozen_ = terminated();
}

bool CurvatureBandit::terminated() const {
    if (static_cast<int>(history_.size()) < cfg_.window) return false;
    const int sum = std::accumulate(history_.begin(), history_.end(), 0);
    return std::abs(sum) <= 1;
}

void CurvatureBandit::restore(double curvature, int intervals, bool frozen,
                              std::optional<double> last_accuracy, std::deque<int> history) {
    if (curvature < cfg_.k_min || curvature > cfg_.k_max) {
        throw InputError("restored curvature outside [k_min, k_max]");
    }
    curvature_ = curvature;
    intervals_ = intervals;
    frozen_ = frozen;
    last_accuracy_ = last_accuracy;
    history_ = std::move(history);
}

}  // namespace rdgcn
