#ifndef FPKFV_SCENARIOS_HPP
#define FPKFV_SCENARIOS_HPP

#include <optional>
#include <string>
#include <vector>

#include "fpkfv/density.hpp"
#include "fpkfv/generator.hpp"
#include "fpkfv/integrator.hpp"
#include "fpkfv/mesh.hpp"

namespace fpkfv {

struct GridSpec {
    int nx = 50, ny = 50;
    double xmin = -4.5, xmax = 4.5, ymin = -4.5, ymax = 4.5;
    std::string topology = "noflux";
    bool explicit_size = false; // set when the config named nx/ny itself
};

/// Mirrors the JSON config consumed by the CLI. Desk-scale defaults halve the
/// reference grids; full_scale restores them.
struct ScenarioConfig {
    std::string scenario = "sample"; // sample | image | vdp | custom
    GridSpec grid;
    double diffusion = 0.5;
    double dt = 0.01;
    long n_steps = 10000;
    long record_every = 0;
    std::vector<double> amplitudes = {0.0, 0.1, 0.2}; // mixture sweep (sample/image)
    double wave_number = 8.0;
    std::string drift;             // named drift for custom runs
    std::string stream;            // named stream for custom runs
    std::string scheme = "upwind"; // upwind | scharfetter-gummel (custom drift runs)
    double floor = 0.1;
    std::string output_dir = "out";
    uint64_t seed = 0;
    bool full_scale = false;

    double vdp_alpha = 10.0;
    double vdp_delta = 0.0;

    std::string image_target;
    std::string image_start; // empty = uniform start

    long walk_paths = 100;
    double walk_horizon = 100.0;
    int walk_start = 0;
};

ScenarioConfig default_config(const std::string& scenario);
ScenarioConfig parse_config(const std::string& json_text, const std::string& scenario_hint = "");
ScenarioConfig load_config_file(const std::string& path, const std::string& scenario_hint = "");

/// The smooth-minimum three-banana target on [-4.5,4.5]^2, floored by +0.1 and
/// normalized to unit mass. Throws on any other domain.
DensityField triple_banana_density(const Mesh& mesh);

/// Four-bump Gaussian mixture start on the same domain, floored and normalized.
DensityField gaussian_mixture_init(const Mesh& mesh);

/// ||rho - target||_2 / ||target||_2 over cell densities.
double relative_rms_error(const DensityField& m, const DensityField& target);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    size_t points = 0;
};

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

/// Fits log(values[k]) ~ intercept - rate * k over the post-transient tail:
/// from the first index where the series has dropped below
/// upper_frac * values[0] until it sinks under floor_rel * values[0]
/// (saturation guard). Returns the decay rate as -slope plus fit quality.
LinearFit fit_decay_rate(const std::vector<double>& values, double upper_frac = 0.1,
                         double floor_rel = 1e-12);

struct AmplitudeRun {
    double amplitude = 0.0;
    std::vector<double> rel_rms;
    std::vector<double> l1_to_target;
    std::vector<double> chi2_series;
    double fitted_rate = 0.0;
    double fit_r_squared = 0.0;
    double final_rel_rms = 0.0;
};

struct SamplingResult {
    Mesh mesh;
    DensityField target;
    std::vector<AmplitudeRun> runs;
    std::vector<std::string> files;
};

/// Mixture-accelerated sampling of the triple-banana target: well-balanced
/// construction checked before stepping, one evolution per configured
/// amplitude, density snapshots and error series written to the output dir.
SamplingResult run_sampling(const ScenarioConfig& cfg);

struct ImageResult {
    int width = 0, height = 0, channels = 0;
    std::vector<std::vector<double>> rel_rms; // per channel
    std::vector<std::string> files;
};

/// Image transformation immersed in the cellular flow; every channel evolves
/// independently toward the target image's channel density.
ImageResult run_image(const ScenarioConfig& cfg);

struct VdpResult {
    Mesh mesh;
    DensityField steady;
    std::vector<double> rms_to_steady;
    double top20_mass_fraction = 0.0; // mass inside the top-20%-density cells
    int cells_for_60_percent = 0;     // smallest cell count holding 60% of mass
    std::vector<std::string> files;
};

/// Stochastic Van der Pol run: upwind generator, uniform start, long-run
/// steady state, concentration statistics of the steady density.
VdpResult run_vdp(const ScenarioConfig& cfg);

struct SteadyRunResult {
    Mesh mesh;
    DensityField pi_inf;
    double residual = 0.0;
    std::vector<std::string> files;
};

/// Steady state of the configured problem (vdp/custom drift or sample target).
SteadyRunResult run_steady(const ScenarioConfig& cfg);

struct WalkRunResult {
    Mesh mesh;
    DensityField occupation;
    double tv_to_steady = 0.0;
    std::vector<std::string> files;
};

/// Gillespie ensemble of the configured generator plus occupation statistics.
WalkRunResult run_walk(const ScenarioConfig& cfg);

/// Concentration statistics of a mass vector: fraction of mass carried by the
/// top `cell_fraction` densest cells, and the smallest number of densest cells
/// covering `mass_fraction` of the mass.
double mass_in_top_cells(const DensityField& m, double cell_fraction);
int cells_covering_mass(const DensityField& m, double mass_fraction);

} // namespace fpkfv

#endif
