#include "vodsim/domain.hpp"

#include <cmath>
#include <set>

namespace vodsim {

bool is_well_formed(const VideoSpec& video) {
    if (video.qualities.empty()) return false;
    std::set<int> seen;
    double prob_sum = 0.0;
    for (const auto& q : video.qualities) {
        if (!seen.insert(q.q_index).second) return false;
        if (q.stream_rate <= 0.0 || q.size <= 0.0) return false;
        if (q.request_prob < 0.0 || q.request_prob > 1.0) return false;
        prob_sum += q.request_prob;
    }
    return std::abs(prob_sum - 1.0) <= 1e-9;
}

} // namespace vodsim
