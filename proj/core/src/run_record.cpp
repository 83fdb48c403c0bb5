#include "vpme/run_record.hpp"

#include <cmath>

#include "vpme/error.hpp"

namespace vpme {

void RunRecord::validate() const {
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i].time > checkpoints[i - 1].time)) {
      fail(ErrorCode::CheckpointMismatch, "checkpoint times must strictly increase (index " + std::to_string(i) + ")");
    }
  }
}

bool RunRecord::all_asserted_pass() const {
  for (const auto& v : verdicts) {
    if (v.asserted && !v.holds) return false;
  }
  return true;
}

const Checkpoint& RunRecord::at_time(double t, double tol) const {
  for (const auto& c : checkpoints) {
    if (std::abs(c.time - t) <= tol) return c;
  }
  fail(ErrorCode::CheckpointMismatch, "no checkpoint at t = " + std::to_string(t));
}

}  // namespace vpme
