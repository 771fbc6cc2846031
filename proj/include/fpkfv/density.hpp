#ifndef FPKFV_DENSITY_HPP
#define FPKFV_DENSITY_HPP

#include <functional>
#include <vector>

#include "fpkfv/mesh.hpp"

namespace fpkfv {

/// Per-cell probability mass m_i = rho_i |C_i| together with the cell volumes,
/// so both the mass and the density view are always available.
struct DensityField {
    std::vector<double> mass;
    std::vector<double> volume;

    int size() const { return static_cast<int>(mass.size()); }
    double density(int i) const { return mass[i] / volume[i]; }
    double total_mass() const;
    double min_mass() const;

    /// Scales to unit total mass. Throws if the total is not positive.
    void normalize();

    static DensityField from_mass(const Mesh& mesh, std::vector<double> mass);
    static DensityField from_density(const Mesh& mesh, const std::vector<double>& rho);
    /// Samples rho(y) at cell centers of a 2D mesh and normalizes.
    static DensityField sample(const Mesh& mesh, const std::function<double(double, double)>& rho);
    static DensityField uniform(const Mesh& mesh);
};

/// l1 distance between mass vectors.
double l1_distance(const DensityField& a, const DensityField& b);

} // namespace fpkfv

#endif
