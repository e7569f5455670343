#pragma once

#include <span>
#include <vector>

#include "cuenet/label.hpp"

namespace cuenet::eval {

/// Per-example majority over k members' predictions. A tied vote goes to
/// label 1 when the members' mean probability is at least 0.5 (only if
/// `probabilities` is given, one sequence per member), otherwise to 0.
/// Throws UsageError when k is 0 and LengthMismatch on ragged input.
std::vector<Label> ensemble_vote(std::span<const std::vector<Label>> votes,
                                 std::span<const std::vector<double>> probabilities = {});

}  // namespace cuenet::eval
