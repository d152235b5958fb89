#include "hyobs/model.hpp"

#include <cmath>
#include <sstream>

namespace hyobs {

PlantModel::PlantModel(Matrix a, Matrix c) : a_(std::move(a)), c_(std::move(c)) {
    if (a_.rows() < 1 || a_.rows() != a_.cols()) {
        std::ostringstream os;
        os << "A must be square with at least one row, got " << a_.rows() << "x" << a_.cols();
        throw DimensionError(os.str());
    }
    if (c_.rows() < 1) {
        throw DimensionError("C must have at least one row");
    }
    require_shape(c_, c_.rows(), a_.rows(), "C");
    require_finite(a_, "A");
    require_finite(c_, "C");
}

TimingBounds::TimingBounds(double t1, double t2) : t1_(t1), t2_(t2) {
    if (!std::isfinite(t1) || !std::isfinite(t2)) {
        throw InvalidInput("T1 and T2 must be finite");
    }
    if (!(t1 > 0.0)) {
        throw InvalidInput("T1 must be strictly positive");
    }
    if (t1 > t2) {
        std::ostringstream os;
        os << "T1 (" << t1 << ") must not exceed T2 (" << t2 << ")";
        throw InvalidInput(os.str());
    }
}

ObserverGains::ObserverGains(Matrix l, Matrix h, Matrix f) : l_(std::move(l)), h_(std::move(h)), f_(std::move(f)) {
    const auto nz = l_.rows();
    const auto ny = l_.cols();
    if (nz < 1 || ny < 1) {
        throw DimensionError("L must be non-empty");
    }
    require_shape(h_, ny, ny, "H");
    require_shape(f_, nz, ny, "F");
    require_finite(l_, "L");
    require_finite(h_, "H");
    require_finite(f_, "F");
}

void ObserverGains::check_against(const PlantModel& plant) const {
    require_shape(l_, plant.nz(), plant.ny(), "L");
    require_shape(h_, plant.ny(), plant.ny(), "H");
    require_shape(f_, plant.nz(), plant.ny(), "F");
}

ObserverGains ObserverGains::zero(const PlantModel& plant) {
    return ObserverGains(Matrix::Zero(plant.nz(), plant.ny()), Matrix::Zero(plant.ny(), plant.ny()),
                         Matrix::Zero(plant.nz(), plant.ny()));
}

Vector HybridState::stacked() const {
    Vector v(eps.size() + theta_tilde.size());
    v << eps, theta_tilde;
    return v;
}

ErrorDynamics build_error_dynamics(const PlantModel& plant, const ObserverGains& gains) {
    gains.check_against(plant);
    const int nz = plant.nz();
    const int ny = plant.ny();
    const Matrix& a = plant.A();
    const Matrix& c = plant.C();
    const Matrix& l = gains.L();
    const Matrix& h = gains.H();
    const Matrix& f = gains.F();

    ErrorDynamics dyn;
    dyn.nz = nz;
    dyn.ny = ny;
    dyn.flow.resize(nz + ny, nz + ny);
    dyn.flow.topLeftCorner(nz, nz) = a - l * c;
    dyn.flow.topRightCorner(nz, ny) = l;
    dyn.flow.bottomLeftCorner(ny, nz) = c * a - c * l * c - h * c;
    dyn.flow.bottomRightCorner(ny, ny) = c * l + h;

    dyn.jump = Matrix::Zero(nz + ny, nz + ny);
    dyn.jump.topLeftCorner(nz, nz) = Matrix::Identity(nz, nz) - f * c;
    return dyn;
}

void check_in_domain(const HybridState& x, const TimingBounds& timing) {
    if (!(x.tau >= 0.0 && x.tau <= timing.T2())) {
        std::ostringstream os;
        os << "timer value " << x.tau << " lies outside [0, " << timing.T2() << "]";
        throw InvalidInput(os.str());
    }
}

double distance_to_attractor(const HybridState& x, const TimingBounds& timing) {
    check_in_domain(x, timing);
    return std::sqrt(x.eps.squaredNorm() + x.theta_tilde.squaredNorm());
}

}  // namespace hyobs
