#ifndef FPKFV_RANDOM_WALK_HPP
#define FPKFV_RANDOM_WALK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fpkfv/density.hpp"
#include "fpkfv/generator.hpp"

namespace fpkfv {

/// Counter-based pseudorandom stream: every draw is a pure function of
/// (key, counter), so ensembles keyed by (seed, path index) are reproducible
/// and order-independent across parallel execution.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream);
    /// strictly inside (0,1)
    double uniform();

private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

struct WalkPath {
    /// consecutive (state, holding time) segments; the last one may be
    /// truncated by the horizon
    std::vector<std::pair<int, double>> segments;
    double horizon = 0.0;
};

/// Exact simulation of the jump chain: exponential holding times via inverse
/// CDF, next state from the embedded transition row. Absorbing states hold to
/// the horizon. Deterministic under a fixed (seed, path_index).
WalkPath gillespie(const JumpChain& chain, int start, double horizon, uint64_t seed,
                   uint64_t path_index = 0);

/// Time-weighted occupation fractions over an ensemble, as a unit-mass field.
DensityField occupation_measure(const std::vector<WalkPath>& paths, const Mesh& mesh);

/// Total variation distance between two mass vectors.
double total_variation(const DensityField& a, const DensityField& b);

/// CSV `path_id,state,holding_time`.
void write_paths_csv(const std::vector<WalkPath>& paths, const std::string& path);

} // namespace fpkfv

#endif
