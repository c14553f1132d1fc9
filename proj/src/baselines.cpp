#include "tiersched/baselines.hpp"

#include <cmath>
#include <limits>

namespace tiersched {

double BaselineKind::weight(int queue) const {
    if (weights.empty()) return 1.0;
    return weights[static_cast<std::size_t>(queue)];
}

void BaselineKind::validate(int n_resources) const {
    if (!weights.empty() && static_cast<int>(weights.size()) != n_resources)
        throw InvariantError("baseline: expected " + std::to_string(n_resources) + " weights");
    for (double w : weights)
        if (w <= 0.0) throw InvariantError("baseline: weights must be > 0");
}

BaselinePolicy baseline_from_name(const std::string& name) {
    if (name == "fcfs") return BaselinePolicy::fcfs;
    if (name == "wlc") return BaselinePolicy::wlc;
    if (name == "wrr") return BaselinePolicy::wrr;
    throw InvariantError("unknown baseline '" + name + "'");
}

const char* to_string(BaselinePolicy policy) {
    switch (policy) {
        case BaselinePolicy::fcfs: return "fcfs";
        case BaselinePolicy::wlc: return "wlc";
        case BaselinePolicy::wrr: return "wrr";
    }
    return "?";
}

int DispatchRule::pick(const std::vector<QueueLoad>& loads) {
    const int n = static_cast<int>(loads.size());
    if (n <= 0) throw InvariantError("dispatch: tier has no queues");
    if (n == 1) return 0;

    auto active = [&loads](int q) {
        return loads[static_cast<std::size_t>(q)].queued +
               (loads[static_cast<std::size_t>(q)].busy ? 1 : 0);
    };

    switch (kind_.policy) {
        case BaselinePolicy::fcfs: {
            int least = std::numeric_limits<int>::max();
            for (int q = 0; q < n; ++q) least = std::min(least, active(q));
            // rotate through tied queues so simultaneous arrivals spread out
            for (int step = 1; step <= n; ++step) {
                const int q = (cursor_ + step) % n;
                if (active(q) == least) {
                    cursor_ = q;
                    return q;
                }
            }
            return 0;  // unreachable
        }
        case BaselinePolicy::wlc: {
            int best = 0;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int q = 0; q < n; ++q) {
                const double ratio = static_cast<double>(active(q)) / kind_.weight(q);
                if (ratio < best_ratio) {
                    best_ratio = ratio;
                    best = q;
                }
            }
            return best;
        }
        case BaselinePolicy::wrr: {
            if (credit_ <= 0) {
                cursor_ = (cursor_ + 1) % n;
                credit_ = std::max(1, static_cast<int>(std::llround(kind_.weight(cursor_))));
            }
            --credit_;
            return cursor_;
        }
    }
    return 0;
}

}  // namespace tiersched
