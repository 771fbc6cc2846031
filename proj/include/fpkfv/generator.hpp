#ifndef FPKFV_GENERATOR_HPP
#define FPKFV_GENERATOR_HPP

#include <string>
#include <vector>

#include "fpkfv/density.hpp"
#include "fpkfv/mesh.hpp"
#include "fpkfv/velocity.hpp"

namespace fpkfv {

enum class SchemeTag { Upwind, PiSymmetric, BScheme };
enum class BFunction { ScharfetterGummel, Upwind };

/// Sparse stochastic Q-matrix: nonnegative jump rates Q_ij off the diagonal,
/// Q_ii = -sum_j Q_ij, so rows sum to zero. Rows index the *departure* state;
/// the forward (mass) dynamics dm/dt = Q^T m uses the transpose, which makes
/// total-mass conservation structural. Immutable once built.
struct Generator {
    int n = 0;
    SchemeTag scheme = SchemeTag::Upwind;
    std::vector<double> cell_volume;

    // CSR of the off-diagonal rates, plus the diagonal
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> rate;
    std::vector<double> diag;

    /// out = Q^T m (forward action on a mass vector).
    void apply_transpose(const std::vector<double>& m, std::vector<double>& out) const;
    /// out_i = sum_{j != i} Q_ji m_j (incoming flux only, diagonal excluded).
    void apply_transpose_offdiag(const std::vector<double>& m, std::vector<double>& out) const;
    /// out = Q f (backward/observable action).
    void apply(const std::vector<double>& f, std::vector<double>& out) const;

    double max_exit_rate() const; // max_i(-Q_ii)
    double rate_between(int from, int to) const;

    /// max_i |(Q^T m)_i| for the mass vector of pi; the well-balancedness residual.
    double stationarity_residual(const DensityField& pi) const;
};

/// Upwind finite volume rates: Q_ij = (area/|C_i|) (D/dist + (b.n)+_ij) for each
/// neighbor j, with no-flux boundary faces contributing nothing.
Generator build_upwind(const Mesh& mesh, const FaceField& drift, double diffusion);

/// Well-balanced rates built from a target measure pi > 0 and a discretely
/// divergence-free velocity u:
///   Q_ij = (area / (pi_i |C_i|)) (D(pi_i+pi_j)/(2 dist) + (u.n)+_ij).
/// pi is renormalized internally to unit mass; Q^T then annihilates the pi mass
/// vector exactly up to roundoff. Throws if pi has a non-positive entry or if
/// the divergence residual exceeds 1e-10 of the max face flux.
Generator build_pi_symmetric(const Mesh& mesh, const FaceField& u, const DensityField& pi,
                             double diffusion);

/// B-scheme family: Q_ij = (D area)/(dist |C_i|) B((b.n)_ji dist / D).
/// BFunction::Upwind reproduces build_upwind bitwise; Scharfetter-Gummel uses
/// B(x) = x/(e^x - 1) with B(0) = 1.
Generator build_b_scheme(const Mesh& mesh, const FaceField& drift, double diffusion, BFunction b);

/// B(x) = x/(e^x-1), evaluated stably through expm1 with the limit B(0)=1.
double bernoulli_b(double x);

/// Embedded jump chain: exit rates lambda_i = -Q_ii and transition rows
/// P_ij = Q_ij/lambda_i. States with lambda_i = 0 are flagged absorbing.
struct JumpChain {
    int n = 0;
    std::vector<double> lambda;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> prob;
    std::vector<char> absorbing;
};

JumpChain jump_chain(const Generator& gen);

/// Antisymmetric residual r(a->b) = Q_ab pi_a|C_a| - Q_ba pi_b|C_b| per stored
/// face; zero everywhere iff the chain is reversible w.r.t. pi.
struct BalanceResidual {
    std::vector<double> per_face;
    double max_abs = 0.0;
};

BalanceResidual detailed_balance_residual(const Generator& gen, const Mesh& mesh,
                                          const DensityField& pi);

/// Sparse text dump: "%%sparse n n nnz" then "i j Q_ij" triplets (diagonal included).
void dump_generator(const Generator& gen, const std::string& path);

} // namespace fpkfv

#endif
