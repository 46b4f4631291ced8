//==============================================================================
// linops.hpp
// Dense discrete realizations of the linearized operators
//   L1 u = kappa u'' - (1/eps)u - u/2 + cos(2 theta)/2 u + kappa theta'^2 u
//          + (1/eps)S[cos theta]cos theta u + (1/eps)S[u]
//   L2 v = kappa v'' + cos(2 theta)v - (1/eps)S[sin theta v]sin theta
//          + (1/eps)S[cos theta]cos theta v
//   L0   = [L1, a L2; -a L1, L2]
// together with their spectra, the quadratic forms G and H, the kernel/range
// splitting of L0, dense semigroup actions, and the randomized certification
// of the abstract block lemma (A, aB; -aA, B) for self-adjoint A, B.
//==============================================================================
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "neelwall/energy.hpp"

namespace neel {

enum class OperatorLabel { L1, L2, L0, Custom };

std::string to_string(OperatorLabel label);

// Pointwise wall quantities entering the assemblies. Kept separate from
// WallProfile so tests can inject transformed (e.g. cyclically shifted)
// coefficient sets.
struct OperatorCoefficients {
    Grid grid;
    RescaledParameters params;
    RealField cos_theta;
    RealField sin_theta;
    RealField theta_prime;
    RealField stray_diag;  // (1/eps) S[cos theta] cos theta

    static OperatorCoefficients from_wall(const WallProfile& wall);
    OperatorCoefficients shifted(int nodes) const;  // cyclic node shift
};

class LinearOperatorMatrix {
public:
    LinearOperatorMatrix(Eigen::MatrixXd entries, bool symmetric, const Grid& grid,
                         OperatorLabel label);

    const Eigen::MatrixXd& entries() const { return entries_; }
    int size() const { return static_cast<int>(entries_.rows()); }
    bool symmetric() const { return symmetric_; }
    const Grid& grid() const { return grid_; }
    OperatorLabel label() const { return label_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return entries_ * u; }

private:
    Eigen::MatrixXd entries_;
    bool symmetric_;
    Grid grid_;
    OperatorLabel label_;
};

LinearOperatorMatrix assemble_L1(const OperatorCoefficients& c);
LinearOperatorMatrix assemble_L2(const OperatorCoefficients& c);
LinearOperatorMatrix assemble_L0(const OperatorCoefficients& c, double alpha);
LinearOperatorMatrix assemble_L1(const WallProfile& wall);
LinearOperatorMatrix assemble_L2(const WallProfile& wall);
LinearOperatorMatrix assemble_L0(const WallProfile& wall, double alpha);

// G(u, v) = (-op u, v)_{L^2}; for op = L2 this is the spectral-gap form, for
// op = L1 the coercive form behind its invertibility.
double quadratic_form_G(const LinearOperatorMatrix& op, const RealField& u, const RealField& v);

// H(u, v) = sum_k (1 + (1/eps) sigma_eps(xi_k)) u_hat conj(v_hat), weighted
// so that H(u, u) >= (u, u)_{L^2}.
double quadratic_form_H(const RealField& u, const RealField& v, double epsilon);

struct SpectrumTolerances {
    double re_tol = 1e-8;    // |Re| below re_tol * scale counts as "on the axis"
    double zero_tol = 1e-6;  // |lambda| below zero_tol * scale counts as zero
};

struct SpectrumReport {
    std::string label;
    int size = 0;
    std::vector<std::complex<double>> eigenvalues;  // sorted by (Re, Im)
    int kernel_dimension = 0;
    double spectral_gap = 0.0;  // distance from 0 to the nearest nonzero eigenvalue
    std::vector<std::complex<double>> imaginary_axis_violations;
    double scale = 0.0;  // spectral radius, used to make tolerances relative
    double max_real_nonzero = 0.0;
    SpectrumTolerances tolerances;
    std::map<std::string, bool> claims;  // optional per-claim pass flags

    std::string to_json() const;
};

SpectrumReport spectrum(const LinearOperatorMatrix& op, SpectrumTolerances tol = {});

// Builds T = (A, alpha B; -alpha A, B) from symmetric A, B and verifies that
// no eigenvalue sits on the imaginary axis away from zero.
SpectrumReport block_lemma_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double alpha,
                                 SpectrumTolerances tol = {});

// Splitting L^2 x L^2 = N(L0) + R(L0): returns the range component
// (f1, f2 - lambda theta') and the kernel coefficient
// lambda = (alpha f1 + f2, theta') / ||theta'||^2.
struct RangeProjection {
    RealField f1;
    RealField f2;
    double lambda;
};
RangeProjection project_range(const RealField& f1, const RealField& f2, const WallProfile& wall,
                              double alpha);

// Solves L0 (u1, u2) = (f1, f2) for (f1, f2) in the range, through the
// decoupled systems (1+a^2) L1 u1 = f1 - a f2 and (1+a^2) L2 u2 = a f1 + f2,
// the latter on the orthogonal complement of theta' (bordered solve).
std::pair<RealField, RealField> solve_in_range(const LinearOperatorMatrix& L1,
                                               const LinearOperatorMatrix& L2,
                                               const WallProfile& wall, double alpha,
                                               const RealField& f1, const RealField& f2);

// exp(t op) u by scaling-and-squaring; dense sizes only.
Eigen::VectorXd semigroup_action(const LinearOperatorMatrix& op, double t,
                                 const Eigen::VectorXd& u);
Eigen::MatrixXd matrix_exponential(const LinearOperatorMatrix& op, double t);

// Dense nonsymmetric eigenvalues (balanced QR via LAPACK dgeev).
std::vector<std::complex<double>> general_eigenvalues(const Eigen::MatrixXd& a);

// Stacking helpers between field pairs and R^{2N} vectors.
Eigen::VectorXd stack_fields(const RealField& top, const RealField& bottom);
std::pair<RealField, RealField> unstack_fields(const Grid& grid, const Eigen::VectorXd& v);

} // namespace neel
