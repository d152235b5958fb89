#pragma once

#include "hyobs/linalg.hpp"

namespace hyobs {

/// Autonomous LTI plant ż = Az, y = Cz.
class PlantModel {
  public:
    PlantModel(Matrix a, Matrix c);

    const Matrix& A() const { return a_; }
    const Matrix& C() const { return c_; }
    int nz() const { return static_cast<int>(a_.rows()); }
    int ny() const { return static_cast<int>(c_.rows()); }

  private:
    Matrix a_;
    Matrix c_;
};

/// Bounds T1 <= t_{k+1} - t_k <= T2 on the inter-sample gaps.
class TimingBounds {
  public:
    TimingBounds(double t1, double t2);

    double T1() const { return t1_; }
    double T2() const { return t2_; }

  private:
    double t1_;
    double t2_;
};

/// Gains of the hybrid observer
///   flows:  ẑ' = Aẑ + Lθ,   θ' = Hθ
///   jumps:  ẑ⁺ = ẑ + F(y − Cẑ),   θ⁺ = (I − CF)(y − Cẑ)
class ObserverGains {
  public:
    ObserverGains(Matrix l, Matrix h, Matrix f);

    const Matrix& L() const { return l_; }
    const Matrix& H() const { return h_; }
    const Matrix& F() const { return f_; }

    /// Throws DimensionError naming the first block incompatible with the plant.
    void check_against(const PlantModel& plant) const;

    static ObserverGains zero(const PlantModel& plant);

  private:
    Matrix l_;
    Matrix h_;
    Matrix f_;
};

/// Flow and jump matrices of the (ε, θ̃) error system.
struct ErrorDynamics {
    Matrix flow;  // [[A−LC, L], [CA−CLC−HC, CL+H]]
    Matrix jump;  // [[I−FC, 0], [0, 0]]
    int nz = 0;
    int ny = 0;
};

/// State x = (ε, θ̃, τ) of the hybrid error system.
struct HybridState {
    Vector eps;
    Vector theta_tilde;
    double tau = 0.0;

    Vector stacked() const;
};

ErrorDynamics build_error_dynamics(const PlantModel& plant, const ObserverGains& gains);

/// Rejects states with τ outside [0, T2]; those lie outside C ∪ D.
void check_in_domain(const HybridState& x, const TimingBounds& timing);

/// |x|_A for A = {0} × {0} × [0, T2].
double distance_to_attractor(const HybridState& x, const TimingBounds& timing);

}  // namespace hyobs
