#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyobs/lmi.hpp"
#include "hyobs/lyapunov.hpp"
#include "hyobs/model.hpp"

namespace hyobs {

/// Cost weights of J = ∫ εᵀQ_Fε dt + Σ εᵀQ_Jε and gain-norm trade-off weights.
struct DesignWeights {
    Matrix QF;
    Matrix QJ;
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    /// Q_F = I, Q_J = 0.01·I.
    static DesignWeights defaults(int nz, double alpha1 = 0.0, double alpha2 = 0.0);

    /// Throws unless Q_F, Q_J are n_z×n_z symmetric positive definite and α1, α2 ≥ 0.
    void validate(int nz) const;
};

struct DesignRaw {
    Matrix Y;
    Matrix X;
    Matrix Z;
    std::optional<double> gamma1;  // absent when α1 = 0
    std::optional<double> gamma2;  // absent when α2 = 0
};

struct DesignResult {
    ObserverGains gains;
    LyapunovCertificate certificate;
    DesignRaw raw;
    DesignWeights weights;
    double objective = 0.0;
    double trace_P1 = 0.0;
    CertificateReport report;
    std::vector<lmi::ConstraintResidual> residuals;
    std::string diagnostics;

    /// Guaranteed cost from ξ: e^{−δτ}εᵀP1ε + (1 + η − e^{−δτ})θ̃ᵀP2θ̃.
    double cost_bound(const HybridState& xi, const TimingBounds& timing) const;
};

struct DesignOutcome {
    lmi::SolveStatus status = lmi::SolveStatus::numerical_failure;
    std::optional<DesignResult> result;
    std::vector<lmi::ConstraintResidual> residuals;
    std::string diagnostics;
};

/// μ̃1 = 1, μ̃2 = e^{δT2}; μ1 = η, μ2 = (1 + η)e^{δT2} − 1. vertex is 1 or 2.
Matrix assemble_R(const PlantModel& plant, const Matrix& p1, const Matrix& p2, const Matrix& x, const Matrix& y,
                  double delta, double eta, const DesignWeights& weights, int vertex, const TimingBounds& timing);

Matrix assemble_design_jump_lmi(const PlantModel& plant, const Matrix& p1, const Matrix& z, const Matrix& qj,
                                double delta, const TimingBounds& timing);

/// L = P1⁻¹Y, H = P2⁻¹X − CP1⁻¹Y, F = P1⁻¹Z. Rejects P1 or P2 with condition number above 1e12.
ObserverGains recover_gains(const Matrix& p1, const Matrix& p2, const Matrix& x, const Matrix& y, const Matrix& z,
                            const Matrix& c);

/// minimize trace(P1) + α1γ1 + α2γ2 over the design conditions, then recover
/// the gains and re-check the analysis conditions at the returned (P1, P2).
DesignOutcome design_optimal(const PlantModel& plant, const TimingBounds& timing, const DesignWeights& weights,
                             double delta, double eta, const lmi::SolverOptions& options = {});

struct GainNormCheck {
    bool holds = false;
    std::optional<double> margin1;  // γ1 − λmax(LᵀP1L)
    std::optional<double> margin2;  // γ2 − λmax(FᵀP1F)
};

GainNormCheck gain_norm_constraints_hold(const DesignResult& result);

struct GridEntry {
    double delta = 0.0;
    double eta = 0.0;
    lmi::SolveStatus status = lmi::SolveStatus::numerical_failure;
    std::optional<double> objective;
    std::string diagnostics;
};

struct GridReport {
    std::optional<DesignResult> best;
    std::vector<GridEntry> table;  // δ-major, η-minor
};

/// Runs design_optimal over delta_grid × eta_grid (concurrently when threads > 1)
/// and keeps the smallest objective; ties go to the smaller δ, then smaller η.
GridReport grid_search(const PlantModel& plant, const TimingBounds& timing, const DesignWeights& weights,
                       const std::vector<double>& delta_grid, const std::vector<double>& eta_grid,
                       const lmi::SolverOptions& options = {}, unsigned threads = 0);

/// n values spaced logarithmically on [lo, hi].
std::vector<double> logspace(double lo, double hi, int n);

}  // namespace hyobs
