#include "fpkfv/mesh.hpp"
#include "fpkfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace fpkfv {

void Mesh::rebuild_adjacency() {
    neighbors.assign(n_cells, {});
    for (int f = 0; f < n_faces(); ++f) {
        const Face& face = faces[f];
        neighbors[face.cell_a].push_back({f, face.cell_b});
        neighbors[face.cell_b].push_back({f, face.cell_a});
    }
}

Mesh build_structured_grid(double xmin, double xmax, double ymin, double ymax,
                           int nx, int ny, Topology topology) {
    if (nx < 1 || ny < 1)
        throw validation_error("build_structured_grid: cell counts must be >= 1");
    if (!(xmax > xmin) || !(ymax > ymin))
        throw validation_error("build_structured_grid: domain has zero or negative extent");
    if (topology == Topology::General)
        throw validation_error("build_structured_grid: topology must be noflux or periodic");
    if (topology == Topology::StructuredPeriodic && (nx < 2 || ny < 2))
        throw validation_error("build_structured_grid: periodic grids need at least 2 cells per axis");

    Mesh m;
    m.topology = topology;
    m.dim = 2;
    m.nx = nx;
    m.ny = ny;
    m.xmin = xmin;
    m.xmax = xmax;
    m.ymin = ymin;
    m.ymax = ymax;
    m.dx = (xmax - xmin) / nx;
    m.dy = (ymax - ymin) / ny;
    m.n_cells = nx * ny;

    m.cell_volume.assign(m.n_cells, m.dx * m.dy);
    m.cell_center.resize(static_cast<size_t>(m.n_cells) * 2);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int c = m.cell_id(ix, iy);
            m.cell_center[2 * c + 0] = xmin + (ix + 0.5) * m.dx;
            m.cell_center[2 * c + 1] = ymin + (iy + 0.5) * m.dy;
        }

    const bool periodic = (topology == Topology::StructuredPeriodic);

    // grid planes; every face vertex is taken from these so that vertices
    // shared between faces are bitwise identical
    auto xplane = [&](int k) { return xmin + k * m.dx; };
    auto yplane = [&](int k) { return ymin + k * m.dy; };

    // Face endpoints follow the counterclockwise traversal of cell_a:
    // an east-pointing face runs bottom->top, a north-pointing face right->left.
    auto push_face = [&](int ca, int cb, double area, double dist, double nxv, double nyv,
                         double mx, double my, double ax, double ay, double bx, double by) {
        m.faces.push_back({ca, cb, area, dist});
        m.face_normal.insert(m.face_normal.end(), {nxv, nyv});
        m.face_midpoint.insert(m.face_midpoint.end(), {mx, my});
        m.face_vertex_a.insert(m.face_vertex_a.end(), {ax, ay});
        m.face_vertex_b.insert(m.face_vertex_b.end(), {bx, by});
    };

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int c = m.cell_id(ix, iy);
            const double xc = xmin + (ix + 0.5) * m.dx;
            const double yc = ymin + (iy + 0.5) * m.dy;

            if (ix + 1 < nx) {
                push_face(c, m.cell_id(ix + 1, iy), m.dy, m.dx, 1.0, 0.0, xplane(ix + 1), yc,
                          xplane(ix + 1), yplane(iy), xplane(ix + 1), yplane(iy + 1));
            } else if (periodic) {
                // wrap face sits on the x = xmin plane; from cell (0,iy) it points -x
                push_face(m.cell_id(0, iy), c, m.dy, m.dx, -1.0, 0.0, xplane(0), yc,
                          xplane(0), yplane(iy + 1), xplane(0), yplane(iy));
            }
            if (iy + 1 < ny) {
                push_face(c, m.cell_id(ix, iy + 1), m.dx, m.dy, 0.0, 1.0, xc, yplane(iy + 1),
                          xplane(ix + 1), yplane(iy + 1), xplane(ix), yplane(iy + 1));
            } else if (periodic) {
                push_face(m.cell_id(ix, 0), c, m.dx, m.dy, 0.0, -1.0, xc, yplane(0),
                          xplane(ix), yplane(0), xplane(ix + 1), yplane(0));
            }
        }
    }

    if (topology == Topology::StructuredNoFlux) {
        for (int ix = 0; ix < nx; ++ix) {
            m.boundary_faces.push_back({m.cell_id(ix, 0), m.dx});
            m.boundary_faces.push_back({m.cell_id(ix, ny - 1), m.dx});
        }
        for (int iy = 0; iy < ny; ++iy) {
            m.boundary_faces.push_back({m.cell_id(0, iy), m.dy});
            m.boundary_faces.push_back({m.cell_id(nx - 1, iy), m.dy});
        }
    }

    m.rebuild_adjacency();
    return m;
}

namespace {

std::vector<double> parse_doubles(std::istringstream& ss) {
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    return out;
}

} // namespace

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("load_mesh: cannot open '" + path + "'");

    Mesh m;
    m.topology = Topology::General;
    m.dim = -1;
    int declared_cells = -1;
    std::vector<bool> seen_cell;

    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw validation_error("load_mesh: " + path + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string kw;
        if (!(ss >> kw)) continue;

        if (kw == "mesh") {
            if (!(ss >> declared_cells) || declared_cells < 1) fail("expected 'mesh <n_cells>' with n_cells >= 1");
            m.n_cells = declared_cells;
            m.cell_volume.assign(declared_cells, 0.0);
            seen_cell.assign(declared_cells, false);
        } else if (kw == "cell") {
            if (declared_cells < 0) fail("'cell' before 'mesh' header");
            int id;
            double vol;
            if (!(ss >> id >> vol)) fail("expected 'cell <id> <volume> <coords...>'");
            if (id < 0 || id >= declared_cells) fail("cell id " + std::to_string(id) + " out of range");
            if (seen_cell[id]) fail("duplicate cell " + std::to_string(id));
            auto coords = parse_doubles(ss);
            if (coords.empty()) fail("cell " + std::to_string(id) + " has no center coordinates");
            if (m.dim < 0) {
                m.dim = static_cast<int>(coords.size());
                m.cell_center.assign(static_cast<size_t>(declared_cells) * m.dim, 0.0);
            } else if (static_cast<int>(coords.size()) != m.dim) {
                fail("cell " + std::to_string(id) + " has " + std::to_string(coords.size()) +
                     " coordinates, expected " + std::to_string(m.dim));
            }
            seen_cell[id] = true;
            m.cell_volume[id] = vol;
            std::copy(coords.begin(), coords.end(), m.cell_center.begin() + static_cast<size_t>(id) * m.dim);
        } else if (kw == "face") {
            if (declared_cells < 0) fail("'face' before 'mesh' header");
            int a, b;
            double area, dist;
            if (!(ss >> a >> b >> area >> dist)) fail("expected 'face <i> <j> <area> <distance> <normal...>'");
            if (a < 0 || a >= declared_cells || !seen_cell[a])
                fail("face references unknown cell " + std::to_string(a));
            if (b < 0 || b >= declared_cells || !seen_cell[b])
                fail("face references unknown cell " + std::to_string(b));
            if (a == b) fail("face joins cell " + std::to_string(a) + " to itself");
            auto normal = parse_doubles(ss);
            if (static_cast<int>(normal.size()) != m.dim)
                fail("face normal has " + std::to_string(normal.size()) + " components, expected " +
                     std::to_string(m.dim));
            if (a > b) { // canonical orientation: lower cell first
                std::swap(a, b);
                for (auto& v : normal) v = -v;
            }
            m.faces.push_back({a, b, area, dist});
            m.face_normal.insert(m.face_normal.end(), normal.begin(), normal.end());
            for (int k = 0; k < m.dim; ++k)
                m.face_midpoint.push_back(0.5 * (m.center(a, k) + m.center(b, k)));
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }

    if (declared_cells < 0) throw validation_error("load_mesh: " + path + ": missing 'mesh' header");
    for (int i = 0; i < declared_cells; ++i)
        if (!seen_cell[i])
            throw validation_error("load_mesh: " + path + ": cell " + std::to_string(i) + " never defined");

    m.rebuild_adjacency();

    auto report = validate_mesh(m);
    if (!report.ok())
        throw validation_error("load_mesh: " + path + ": " + report.violations.front());
    return m;
}

double mesh_resolution(const Mesh& mesh) {
    if (mesh.structured()) return std::max(mesh.dx, mesh.dy);
    double h = 0.0;
    for (const Face& f : mesh.faces) h = std::max(h, f.distance);
    if (h <= 0.0) throw validation_error("mesh_resolution: general mesh has no faces");
    return h;
}

MeshValidation validate_mesh(const Mesh& mesh) {
    MeshValidation rep;
    auto flag = [&](const std::string& s) { rep.violations.push_back(s); };

    for (int i = 0; i < mesh.n_cells; ++i)
        if (!(mesh.cell_volume[i] > 0.0))
            flag("cell " + std::to_string(i) + " has non-positive volume");

    std::map<std::pair<int, int>, int> seen;
    for (int f = 0; f < mesh.n_faces(); ++f) {
        const Face& face = mesh.faces[f];
        if (!(face.area > 0.0)) flag("face " + std::to_string(f) + " has non-positive area");
        if (!(face.distance > 0.0)) flag("face " + std::to_string(f) + " has non-positive center distance");
        if (face.cell_a == face.cell_b) flag("face " + std::to_string(f) + " is a self-loop");
        auto key = std::minmax(face.cell_a, face.cell_b);
        if (seen.count({key.first, key.second}))
            flag("cell pair {" + std::to_string(key.first) + "," + std::to_string(key.second) +
                 "} appears in more than one face");
        seen[{key.first, key.second}] = f;
        rep.face_weighted_distance_sum += face.area * face.distance;
    }

    // adjacency symmetry
    if (static_cast<int>(mesh.neighbors.size()) != mesh.n_cells) {
        flag("adjacency lists missing");
    } else {
        for (int i = 0; i < mesh.n_cells; ++i)
            for (auto [f, j] : mesh.neighbors[i]) {
                bool back = false;
                for (auto [g, k] : mesh.neighbors[j])
                    if (k == i && g == f) back = true;
                if (!back)
                    flag("adjacency not symmetric between cells " + std::to_string(i) + " and " +
                         std::to_string(j));
            }
    }

    // connectivity of the face graph (irreducibility prerequisite)
    if (mesh.n_cells > 0 && static_cast<int>(mesh.neighbors.size()) == mesh.n_cells) {
        std::vector<char> visited(mesh.n_cells, 0);
        std::queue<int> q;
        q.push(0);
        visited[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            for (auto [f, j] : mesh.neighbors[i])
                if (!visited[j]) {
                    visited[j] = 1;
                    ++count;
                    q.push(j);
                }
        }
        if (count != mesh.n_cells && mesh.n_cells > 1)
            flag("face graph is disconnected (" + std::to_string(count) + " of " +
                 std::to_string(mesh.n_cells) + " cells reachable from cell 0)");
    }

    return rep;
}

} // namespace fpkfv
