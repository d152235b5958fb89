#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyobs/lyapunov.hpp"
#include "hyobs/model.hpp"
#include "hyobs/synthesis.hpp"

namespace hyobs {

/// A simulation produced a non-finite state; the message names the interval.
class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Sampling instants t_1 < t_2 < ... with 0 ≤ t_1 ≤ T2 and T1 ≤ t_{k+1} − t_k ≤ T2.
class SamplingSequence {
  public:
    SamplingSequence(std::vector<double> times, const TimingBounds& timing);

    const std::vector<double>& times() const { return times_; }
    const TimingBounds& timing() const { return timing_; }

  private:
    std::vector<double> times_;
    TimingBounds timing_;
};

struct SamplingPolicy {
    enum class Kind { periodic, uniform_random, sinusoidal, explicit_times };

    Kind kind = Kind::sinusoidal;
    double period = 0.0;                // periodic
    std::uint64_t seed = 0;             // uniform_random
    std::vector<double> times;          // explicit_times
    std::optional<double> first_sample;  // t_1; defaults: period, U[0, T2], 0

    static SamplingPolicy periodic(double period);
    static SamplingPolicy uniform_random(std::uint64_t seed);
    static SamplingPolicy sinusoidal();
    static SamplingPolicy explicit_times(std::vector<double> times);
};

std::string to_string(SamplingPolicy::Kind kind);

/// Generates instants until one lies at or beyond the horizon. The sinusoidal
/// policy resets the timer at a jump at time t to (T2 − T1)/2·sin(t) + (T2 + T1)/2.
SamplingSequence generate_sampling(const SamplingPolicy& policy, const TimingBounds& timing, double horizon);

struct ErrorInit {
    Vector eps;
    Vector theta_tilde;
    double tau = 0.0;
};

struct PlantInit {
    Vector z;
    Vector zhat;
    Vector theta;
    double tau = 0.0;

    /// ε = z − ẑ, θ̃ = Cε − θ.
    ErrorInit to_error(const PlantModel& plant) const;
};

struct SimulationOptions {
    int dense_points = 200;  // per flow interval, endpoints included
};

struct ArcPoint {
    double t = 0.0;
    int j = 0;
    double tau = 0.0;
    Vector x;
};

struct FlowInterval {
    int j = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    double tau_start = 0.0;
    Vector x_start;
    std::vector<ArcPoint> points;
};

struct JumpRecord {
    double t = 0.0;
    int j = 0;  // jump index, j ≥ 1; the arc continues on interval j
    Vector pre;
    Vector post;
    double tau_post = 0.0;
};

/// Solution on a hybrid time domain. For error arcs x = (ε, θ̃); for
/// plant/observer arcs x = (z, ẑ, θ).
struct HybridArc {
    enum class Coordinates { error, plant_observer };

    Coordinates coordinates = Coordinates::error;
    int nz = 0;
    int ny = 0;
    Matrix flow;  // x' = flow·x on every interval
    std::vector<FlowInterval> intervals;
    std::vector<JumpRecord> jumps;

    /// Exact state on interval j at time t (by matrix exponential from the interval start).
    Vector state_at(double t, int j) const;
    /// Error-coordinate state of a recorded point.
    HybridState error_state(const ArcPoint& p, const Matrix& c) const;
};

HybridArc simulate_error(const PlantModel& plant, const ObserverGains& gains, const ErrorInit& init,
                         const SamplingSequence& sampling, double horizon, const SimulationOptions& options = {});

HybridArc simulate_plant(const PlantModel& plant, const ObserverGains& gains, const PlantInit& init,
                         const SamplingSequence& sampling, double horizon, const SimulationOptions& options = {});

/// Same time domain, every state mapped to (ε, θ̃).
HybridArc to_error_coordinates(const HybridArc& arc, const PlantModel& plant);

/// Adaptive Runge–Kutta (Dormand–Prince) integration of x' = flow·x over [0, t],
/// used only to cross-check the exact flow.
Vector integrate_flow_rk(const Matrix& flow, const Vector& x0, double t, double rel_tol = 1e-10);

struct CostEvaluation {
    double flow_cost = 0.0;
    double jump_cost = 0.0;
    double total = 0.0;
    double quadrature_error_estimate = 0.0;
};

/// Flow cost by adaptive Gauss–Kronrod quadrature on each interval, jump cost
/// summed over the pre-jump states of every jump. Requires an error arc.
CostEvaluation evaluate_cost(const HybridArc& arc, const DesignWeights& weights);

struct MonotonicityReport {
    bool flow_monotone = true;
    bool jumps_nonincreasing = true;
    double worst_flow_violation = 0.0;  // max relative increase over consecutive flow points
    double worst_jump_violation = 0.0;  // max relative increase across a jump
    double violation_t = 0.0;
    int violation_j = 0;
    double chi_c_hat = 0.0;  // from ln V ≈ c − 2χ_c t − 2χ_d j
    double chi_d_hat = 0.0;
    double tolerance = 1e-9;

    bool passed() const { return flow_monotone && jumps_nonincreasing; }
};

MonotonicityReport check_lyapunov_monotonicity(const HybridArc& arc, const PlantModel& plant,
                                               const LyapunovCertificate& cert, const TimingBounds& timing,
                                               double tolerance = 1e-9);

struct GesEnvelope {
    double k = 1.0;
    double lambda = 0.0;
    bool exponentially_decaying = false;
};

/// |φ(t, j)|_A ≤ k e^{−λ(t+j)} |φ(0, 0)|_A: λ from a least-squares fit of
/// ln|φ| against t + j, then the smallest k for which the bound holds at every point.
GesEnvelope fit_ges_envelope(const HybridArc& arc, const PlantModel& plant, const TimingBounds& timing);

/// Columnar export: t, j, eps_i, theta_tilde_i, tau, dist[, V]; 17 significant digits.
void write_arc_csv(std::ostream& os, const HybridArc& arc, const PlantModel& plant, const TimingBounds& timing,
                   const LyapunovCertificate* cert = nullptr);

/// t, j, pre/post components of the state, tau_post.
void write_jumps_csv(std::ostream& os, const HybridArc& arc);

}  // namespace hyobs
