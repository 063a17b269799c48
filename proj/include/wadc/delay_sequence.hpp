#pragma once

#include <cstdint>
#include <vector>

namespace wadc {

/// Per-emission-step effective delays in sampling steps, either derived from
/// a PDC emission log or drawn synthetically.
struct DelaySequence {
    std::vector<int> entries;
    int n_min = 0;
    int n_max = 0;
    std::uint64_t seed = 0;  ///< generator seed when synthetic, 0 otherwise
};

} // namespace wadc
