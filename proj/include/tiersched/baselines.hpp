#pragma once

#include <string>
#include <vector>

#include "tiersched/types.hpp"

namespace tiersched {

/// Load seen by a dispatch rule: jobs queued at the resource plus whether
/// one is in service.
struct QueueLoad {
    int queued = 0;
    bool busy = false;
};

enum class BaselinePolicy {
    fcfs,  // least jobs by count, round-robin among ties, append at tail
    wlc,   // least (active jobs / weight), lowest queue wins ties
    wrr,   // cyclic pointer, each queue served `weight` times per round
};

struct BaselineKind {
    BaselinePolicy policy = BaselinePolicy::fcfs;
    std::vector<double> weights;  // per resource; empty means all 1

    double weight(int queue) const;
    void validate(int n_resources) const;
};

BaselinePolicy baseline_from_name(const std::string& name);
const char* to_string(BaselinePolicy policy);

/// One tier's dispatch rule. fcfs and wrr carry a cursor between calls;
/// the rule is owned by the single-threaded event loop.
class DispatchRule {
  public:
    explicit DispatchRule(BaselineKind kind) : kind_(std::move(kind)) {}

    /// Queue index for the next arriving job. `loads` has one entry per
    /// resource of the tier.
    int pick(const std::vector<QueueLoad>& loads);

    const BaselineKind& kind() const { return kind_; }

  private:
    BaselineKind kind_;
    int cursor_ = -1;     // fcfs tie rotation / wrr position
    int credit_ = 0;      // wrr servings left at the current position
};

}  // namespace tiersched
