#include "hyobs/cli/benchmark.hpp"

#include <cmath>
#include <sstream>

namespace hyobs::cli {

namespace {

Matrix column(double a, double b) {
    Matrix m(2, 1);
    m << a, b;
    return m;
}

Matrix scalar(double a) { return Matrix::Constant(1, 1, a); }

}  // namespace

ProblemConfig benchmark_config() {
    Matrix a(2, 2);
    a << 0.2, -1.01, 1.0, 0.0;
    Matrix c(1, 2);
    c << 0.5, -1.0;
    PlantModel plant(a, c);

    DesignSection design;
    design.QF = Matrix::Identity(2, 2);
    design.QJ = 0.01 * Matrix::Identity(2, 2);
    design.delta = 0.03;
    design.eta = 1e-4;

    SimulationSection sim;
    sim.initial.form = InitialCondition::Form::plant_observer;
    sim.initial.z = Vector::Zero(2);
    sim.initial.z(0) = 10.0;
    sim.initial.zhat = Vector::Zero(2);
    sim.initial.theta = Vector::Constant(1, 5.0);
    sim.initial.tau = 0.0;
    sim.horizon = 30.0;
    sim.sampling = SamplingPolicy::sinusoidal();
    sim.sampling.first_sample = 0.0;

    return ProblemConfig{std::move(plant), TimingBounds(0.5, 1.1), std::move(design), std::move(sim)};
}

std::vector<BenchmarkCase> benchmark_cases() {
    return {
        {"I", true, 0.0, 0.0, ObserverGains(column(10877.0, -98807.0), scalar(-104250.0), column(0.104, -0.948)),
         353.8},
        {"II", true, 100.0, 0.1, ObserverGains(column(3.68, -24.47), scalar(-25.93), column(0.104, -0.948)), 354.7},
        {"III", true, 100.0, 1.0, ObserverGains(column(3.68, -24.47), scalar(-11.47), column(0.040, -0.364)), 357.1},
        {"IV", false, 0.0, 0.0, ObserverGains(column(0.0, 0.0), scalar(0.0), column(0.097, -0.905)), std::nullopt},
        {"V", false, 0.0, 0.0, ObserverGains(column(0.0, 0.0), scalar(0.0), column(0.183, -0.333)), std::nullopt},
    };
}

const BenchmarkCase& benchmark_case(const std::string& name) {
    static const std::vector<BenchmarkCase> cases = benchmark_cases();
    for (const auto& c : cases) {
        if (c.name == name) return c;
    }
    throw InvalidInput("unknown benchmark case " + name);
}

JumpSizeComparison compare_jump_sizes(const HybridArc& lhs, const HybridArc& rhs, int component) {
    if (lhs.coordinates != HybridArc::Coordinates::error || rhs.coordinates != HybridArc::Coordinates::error) {
        throw InvalidInput("jump comparison needs arcs in error coordinates");
    }
    if (component < 0 || component >= lhs.nz || lhs.nz != rhs.nz) {
        throw InvalidInput("component index outside the error state");
    }
    if (lhs.jumps.size() != rhs.jumps.size()) {
        throw InvalidInput("arcs have different numbers of jumps");
    }
    JumpSizeComparison out;
    for (std::size_t k = 0; k < lhs.jumps.size(); ++k) {
        const JumpRecord& a = lhs.jumps[k];
        const JumpRecord& b = rhs.jumps[k];
        if (std::abs(a.t - b.t) > 1e-12 * (1.0 + std::abs(a.t))) {
            std::ostringstream os;
            os << "jump " << k + 1 << " happens at " << a.t << " and " << b.t;
            throw InvalidInput(os.str());
        }
        const double da = std::abs(a.post(component) - a.pre(component));
        const double db = std::abs(b.post(component) - b.pre(component));
        ++out.matched;
        out.times.push_back(a.t);
        out.lhs.push_back(da);
        out.rhs.push_back(db);
        if (da < db) {
            ++out.strictly_smaller;
        } else if (!out.first_violation_t) {
            out.first_violation_t = a.t;
        }
    }
    return out;
}

}  // namespace hyobs::cli
