#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyobs/lmi.hpp"
#include "hyobs/model.hpp"

namespace hyobs {

/// V(x) = e^{−δτ}εᵀP1ε + (1 + η − e^{−δτ})θ̃ᵀP2θ̃
class LyapunovCertificate {
  public:
    /// P1, P2 must be symmetric positive definite, δ ≥ 0 and η > 0.
    LyapunovCertificate(Matrix p1, Matrix p2, double delta, double eta);

    const Matrix& P1() const { return p1_; }
    const Matrix& P2() const { return p2_; }
    double delta() const { return delta_; }
    double eta() const { return eta_; }

  private:
    Matrix p1_;
    Matrix p2_;
    double delta_;
    double eta_;
};

struct SectorBounds {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;
};

struct JumpContraction {
    double varpi_d = 0.0;
    double chi_d = 0.0;
    double lambda_max_Q = 0.0;
};

struct CertificateReport {
    std::array<double, 2> flow_vertex_eigs{};  // λmax(M(μ1)), λmax(M(μ2))
    double jump_eig = 0.0;                     // λmax of the jump block matrix
    double jump_tolerance = 0.0;               // jump_eig ≤ jump_tolerance counts as ⪯ 0
    double mu1 = 0.0;
    double mu2 = 0.0;
    double p1_min_eig = 0.0;
    double p2_min_eig = 0.0;
    JumpContraction jump;
    SectorBounds sector;
    bool feasible = false;
};

/// μ(τ) = (1 + η)e^{δτ} − 1
double mu_of_tau(const LyapunovCertificate& cert, double tau);

/// (μ1, μ2) = (η, (1 + η)e^{δT2} − 1)
std::pair<double, double> vertex_mus(const LyapunovCertificate& cert, const TimingBounds& timing);

Matrix assemble_M(const PlantModel& plant, const ObserverGains& gains, const LyapunovCertificate& cert, double mu);

Matrix assemble_jump_lmi(const PlantModel& plant, const Matrix& f, const LyapunovCertificate& cert,
                         const TimingBounds& timing);

/// Q = e^{−δT1}(I − FC)ᵀP1(I − FC) − P1
Matrix jump_schur_complement(const PlantModel& plant, const Matrix& f, const LyapunovCertificate& cert,
                             const TimingBounds& timing);

double evaluate_V(const LyapunovCertificate& cert, const HybridState& x, const TimingBounds& timing);

/// d/dt V along flows: e^{−δτ}[ε; θ̃]ᵀ M(μ(τ)) [ε; θ̃].
double flow_derivative_V(const PlantModel& plant, const ObserverGains& gains, const LyapunovCertificate& cert,
                         const HybridState& x, const TimingBounds& timing);

SectorBounds sector_bounds(const LyapunovCertificate& cert, const TimingBounds& timing);

/// ϖ_d = min(|λmax(Q)|/α2, 1 − guard) and χ_d = −½ ln(1 − ϖ_d).
/// Throws InvalidInput when Q has a positive eigenvalue beyond round-off.
JumpContraction compute_varpi_d(const PlantModel& plant, const Matrix& f, const LyapunovCertificate& cert,
                                const TimingBounds& timing);

/// Evaluates every analysis condition at a fixed certificate.
CertificateReport make_report(const PlantModel& plant, const ObserverGains& gains, const LyapunovCertificate& cert,
                              const TimingBounds& timing);

struct VerifyOutcome {
    lmi::SolveStatus status = lmi::SolveStatus::numerical_failure;
    std::optional<LyapunovCertificate> certificate;
    std::optional<CertificateReport> report;
    std::vector<lmi::ConstraintResidual> residuals;
    std::string diagnostics;

    bool found() const { return certificate.has_value(); }
};

/// Searches (P1, P2) for fixed (δ, η): flow vertices strictly negative,
/// jump condition non-strictly, normalized by trace(P1) + trace(P2) = n_z + n_y.
/// Infeasibility is a regular outcome, not an error.
VerifyOutcome verify_gains(const PlantModel& plant, const ObserverGains& gains, const TimingBounds& timing,
                           double delta, double eta, const lmi::SolverOptions& options = {});

}  // namespace hyobs
