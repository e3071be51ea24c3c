#pragma once

#include <cstdint>

#include "phasewalk/model.hpp"

namespace phasewalk {

/// Phase-space sample carrying an Ising sign. Signed averages sum(sign * O) / sum(sign)
/// over an ensemble of walkers reproduce Wigner-function expectation values.
struct SignedWalker {
    PhasePoint point;
    int sign = +1;
    std::uint64_t id = 0;
};

} // namespace phasewalk
