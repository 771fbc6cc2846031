#ifndef FPKFV_MESH_HPP
#define FPKFV_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fpkfv {

enum class Topology { StructuredNoFlux, StructuredPeriodic, General };

/// One interior face, stored once per unordered cell pair with the orientation
/// cell_a -> cell_b. The unit normal refers to that orientation and flips sign
/// with it.
struct Face {
    int cell_a = -1;
    int cell_b = -1;
    double area = 0.0;     // |face|
    double distance = 0.0; // |center_b - center_a| (wrap distance on periodic grids)
};

/// Face of a structured no-flux grid lying on the domain boundary (one cell only).
struct BoundaryFace {
    int cell = -1;
    double area = 0.0;
};

/// Cell/face geometry consumed by the schemes. Immutable after construction;
/// safe to share across threads.
///
/// Coordinates are stored flat: cell_center[i*dim + k], face_normal[f*dim + k].
/// face_midpoint is the drift evaluation point (face bisection point on
/// structured grids, segment midpoint for ingested meshes). face_vertex_a/b are
/// the 2D face endpoints in counterclockwise order around cell_a; they exist
/// only for structured grids (needed by the stream-function discretization).
struct Mesh {
    int n_cells = 0;
    int dim = 0;
    Topology topology = Topology::General;

    std::vector<double> cell_volume;
    std::vector<double> cell_center;

    std::vector<Face> faces;
    std::vector<double> face_normal;
    std::vector<double> face_midpoint;
    std::vector<double> face_vertex_a; // structured 2D only, else empty
    std::vector<double> face_vertex_b;

    std::vector<BoundaryFace> boundary_faces;

    // adjacency: for cell i, the (face index, neighbor cell) pairs
    std::vector<std::vector<std::pair<int, int>>> neighbors;

    // structured-grid bookkeeping (valid when topology != General)
    int nx = 0, ny = 0;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    double dx = 0, dy = 0;

    bool structured() const { return topology != Topology::General; }
    int n_faces() const { return static_cast<int>(faces.size()); }

    double normal(int f, int k) const { return face_normal[static_cast<size_t>(f) * dim + k]; }
    double midpoint(int f, int k) const { return face_midpoint[static_cast<size_t>(f) * dim + k]; }
    double center(int c, int k) const { return cell_center[static_cast<size_t>(c) * dim + k]; }

    int cell_id(int ix, int iy) const { return ix + iy * nx; }

    /// Rebuilds the adjacency lists from the face list.
    void rebuild_adjacency();
};

struct MeshValidation {
    std::vector<std::string> violations;
    /// sum over stored faces of area * center distance (bounded for admissible
    /// tessellations; reported, never asserted here)
    double face_weighted_distance_sum = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Uniform rectangular grid on [xmin,xmax] x [ymin,ymax] with nx*ny cells.
/// No-flux topology records boundary faces; periodic topology adds wrap faces
/// whose center distance is the wrap distance.
Mesh build_structured_grid(double xmin, double xmax, double ymin, double ymax,
                           int nx, int ny, Topology topology);

/// Reads the line-oriented mesh text format:
///   mesh <n_cells>
///   cell <id> <volume> <center coords...>
///   face <i> <j> <area> <distance> <normal coords...>
/// '#' starts a comment. Throws validation_error with the offending line number
/// on parse failures and with the offending entity on validation failures.
Mesh load_mesh(const std::string& path);

/// max(dx, dy) on structured grids; max face center distance otherwise.
double mesh_resolution(const Mesh& mesh);

/// Report-only invariant check: positivity, duplicate faces, adjacency
/// symmetry, connectivity of the face graph.
MeshValidation validate_mesh(const Mesh& mesh);

} // namespace fpkfv

#endif
