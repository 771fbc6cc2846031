#include "fpkfv/random_walk.hpp"
#include "fpkfv/errors.hpp"

#include <cmath>
#include <fstream>

namespace fpkfv {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xda942042e4dd58b5ull))) {}

double CounterRng::uniform() {
    const uint64_t x = splitmix64(key_ ^ (++counter_) * 0xd1342543de82ef95ull);
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

WalkPath gillespie(const JumpChain& chain, int start, double horizon, uint64_t seed,
                   uint64_t path_index) {
    if (start < 0 || start >= chain.n)
        throw validation_error("gillespie: start state " + std::to_string(start) + " out of range");
    if (!(horizon > 0.0)) throw validation_error("gillespie: horizon must be positive");

    CounterRng rng(seed, path_index);
    WalkPath path;
    path.horizon = horizon;

    int state = start;
    double t = 0.0;
    while (t < horizon) {
        if (chain.absorbing[state]) {
            path.segments.emplace_back(state, horizon - t);
            break;
        }
        const double hold = -std::log(rng.uniform()) / chain.lambda[state];
        if (t + hold >= horizon) {
            path.segments.emplace_back(state, horizon - t);
            break;
        }
        path.segments.emplace_back(state, hold);
        t += hold;

        const double u = rng.uniform();
        double acc = 0.0;
        int next = state;
        for (int k = chain.row_ptr[state]; k < chain.row_ptr[state + 1]; ++k) {
            acc += chain.prob[k];
            next = chain.col[k];
            if (u <= acc) break;
        }
        state = next;
    }
    return path;
}

DensityField occupation_measure(const std::vector<WalkPath>& paths, const Mesh& mesh) {
    if (paths.empty()) throw validation_error("occupation_measure: no paths given");

    std::vector<double> occupancy(mesh.n_cells, 0.0);
    double total = 0.0;
    for (const WalkPath& p : paths)
        for (const auto& [state, hold] : p.segments) {
            occupancy[state] += hold;
            total += hold;
        }
    if (!(total > 0.0)) throw validation_error("occupation_measure: zero total time");

    for (double& v : occupancy) v /= total;
    return DensityField{std::move(occupancy), mesh.cell_volume};
}

double total_variation(const DensityField& a, const DensityField& b) {
    return 0.5 * l1_distance(a, b);
}

void write_paths_csv(const std::vector<WalkPath>& paths, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("write_paths_csv: cannot write '" + path + "'");
    out << "path_id,state,holding_time\n";
    out.precision(17);
    for (size_t p = 0; p < paths.size(); ++p)
        for (const auto& [state, hold] : paths[p].segments)
            out << p << "," << state << "," << hold << "\n";
}

} // namespace fpkfv
