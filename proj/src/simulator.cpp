#include "hyobs/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

namespace hyobs {

namespace {

double gap_tolerance(double t) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)); }

void require_vector(const Vector& v, int n, const std::string& name) {
    if (v.size() != n) {
        std::ostringstream os;
        os << name << " must have length " << n << ", got " << v.size();
        throw DimensionError(os.str());
    }
    if (!v.allFinite()) {
        throw InvalidInput(name + " contains non-finite entries");
    }
}

struct Hybrid {
    Matrix flow;
    Matrix jump;
};

HybridArc run(const Hybrid& sys, HybridArc::Coordinates coords, int nz, int ny, const Vector& x0, double tau0,
              const SamplingSequence& sampling, double horizon, const SimulationOptions& options) {
    if (!std::isfinite(horizon) || !(horizon > 0.0)) {
        throw InvalidInput("horizon must be positive");
    }
    if (options.dense_points < 2) {
        throw InvalidInput("dense_points must be at least 2");
    }
    const auto& times = sampling.times();
    if (times.back() < horizon) {
        std::ostringstream os;
        os << "sampling sequence ends at " << times.back() << ", before the horizon " << horizon;
        throw InvalidInput(os.str());
    }
    if (std::abs(tau0 - times.front()) > gap_tolerance(times.front())) {
        std::ostringstream os;
        os << "initial timer " << tau0 << " must equal the first sampling instant " << times.front();
        throw InvalidInput(os.str());
    }

    HybridArc arc;
    arc.coordinates = coords;
    arc.nz = nz;
    arc.ny = ny;
    arc.flow = sys.flow;

    double t = 0.0;
    double tau = std::min(times.front(), sampling.timing().T2());
    Vector x = x0;
    for (std::size_t k = 0;; ++k) {
        const bool last = times[k] >= horizon;
        const double t_end = last ? horizon : times[k];
        FlowInterval iv;
        iv.j = static_cast<int>(k);
        iv.t_start = t;
        iv.t_end = t_end;
        iv.tau_start = tau;
        iv.x_start = x;
        const double len = t_end - t;
        const int n = len > 0.0 ? options.dense_points : 1;
        for (int i = 0; i < n; ++i) {
            ArcPoint p;
            p.j = iv.j;
            const double s = i == n - 1 ? len : len * i / (n - 1);
            p.t = i == n - 1 ? t_end : t + s;
            p.tau = std::max(0.0, tau - s);
            p.x = i == 0 ? x : Vector(expm(sys.flow * s) * x);
            if (!p.x.allFinite()) {
                std::ostringstream os;
                os << "non-finite state on flow interval j=" << iv.j << " [" << t << ", " << t_end << "]";
                throw SimulationError(os.str());
            }
            iv.points.push_back(std::move(p));
        }
        x = iv.points.back().x;
        if (!last) {
            iv.points.back().tau = 0.0;
        }
        arc.intervals.push_back(std::move(iv));
        if (last) {
            break;
        }
        JumpRecord jr;
        jr.t = times[k];
        jr.j = static_cast<int>(k) + 1;
        jr.pre = x;
        jr.post = sys.jump * x;
        // Gaps may exceed T2 by round-off only (checked on construction).
        jr.tau_post = std::min(times[k + 1] - times[k], sampling.timing().T2());
        x = jr.post;
        tau = jr.tau_post;
        t = times[k];
        arc.jumps.push_back(std::move(jr));
    }
    return arc;
}

std::vector<std::string> state_names(const HybridArc& arc) {
    std::vector<std::string> names;
    auto add = [&](const std::string& base, int n) {
        for (int i = 1; i <= n; ++i) {
            names.push_back(base + "_" + std::to_string(i));
        }
    };
    if (arc.coordinates == HybridArc::Coordinates::error) {
        add("eps", arc.nz);
        add("theta_tilde", arc.ny);
    } else {
        add("z", arc.nz);
        add("zhat", arc.nz);
        add("theta", arc.ny);
    }
    return names;
}

}  // namespace

SamplingSequence::SamplingSequence(std::vector<double> times, const TimingBounds& timing)
    : times_(std::move(times)), timing_(timing) {
    if (times_.empty()) {
        throw InvalidInput("sampling sequence is empty");
    }
    for (double t : times_) {
        if (!std::isfinite(t)) {
            throw InvalidInput("sampling instants must be finite");
        }
    }
    if (times_.front() < 0.0 || times_.front() > timing.T2() + gap_tolerance(timing.T2())) {
        std::ostringstream os;
        os << "first sampling instant " << times_.front() << " must lie in [0, " << timing.T2() << "]";
        throw InvalidInput(os.str());
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
        const double gap = times_[k] - times_[k - 1];
        const double tol = gap_tolerance(times_[k]);
        if (gap < timing.T1() - tol || gap > timing.T2() + tol) {
            std::ostringstream os;
            os << "sampling gap " << gap << " between t=" << times_[k - 1] << " and t=" << times_[k]
               << " lies outside [" << timing.T1() << ", " << timing.T2() << "]";
            throw InvalidInput(os.str());
        }
    }
}

SamplingPolicy SamplingPolicy::periodic(double period) {
    SamplingPolicy p;
    p.kind = Kind::periodic;
    p.period = period;
    return p;
}

SamplingPolicy SamplingPolicy::uniform_random(std::uint64_t seed) {
    SamplingPolicy p;
    p.kind = Kind::uniform_random;
    p.seed = seed;
    return p;
}

SamplingPolicy SamplingPolicy::sinusoidal() { return SamplingPolicy{}; }

SamplingPolicy SamplingPolicy::explicit_times(std::vector<double> times) {
    SamplingPolicy p;
    p.kind = Kind::explicit_times;
    p.times = std::move(times);
    return p;
}

std::string to_string(SamplingPolicy::Kind kind) {
    switch (kind) {
        case SamplingPolicy::Kind::periodic: return "periodic";
        case SamplingPolicy::Kind::uniform_random: return "uniform_random";
        case SamplingPolicy::Kind::sinusoidal: return "sinusoidal";
        case SamplingPolicy::Kind::explicit_times: return "explicit";
    }
    return "unknown";
}

SamplingSequence generate_sampling(const SamplingPolicy& policy, const TimingBounds& timing, double horizon) {
    if (!std::isfinite(horizon) || !(horizon > 0.0)) {
        throw InvalidInput("horizon must be positive");
    }
    const double t1 = timing.T1();
    const double t2 = timing.T2();
    std::vector<double> times;
    switch (policy.kind) {
        case SamplingPolicy::Kind::periodic: {
            if (!(policy.period >= t1 && policy.period <= t2)) {
                std::ostringstream os;
                os << "period " << policy.period << " lies outside [" << t1 << ", " << t2 << "]";
                throw InvalidInput(os.str());
            }
            const double first = policy.first_sample.value_or(policy.period);
            for (long k = 0;; ++k) {
                times.push_back(first + static_cast<double>(k) * policy.period);
                if (times.back() >= horizon) break;
            }
            break;
        }
        case SamplingPolicy::Kind::uniform_random: {
            std::mt19937_64 rng(policy.seed);
            std::uniform_real_distribution<double> first_dist(0.0, t2);
            std::uniform_real_distribution<double> gap_dist(t1, t2);
            times.push_back(policy.first_sample ? *policy.first_sample : first_dist(rng));
            while (times.back() < horizon) {
                times.push_back(times.back() + gap_dist(rng));
            }
            break;
        }
        case SamplingPolicy::Kind::sinusoidal: {
            times.push_back(policy.first_sample.value_or(0.0));
            while (times.back() < horizon) {
                const double t = times.back();
                times.push_back(t + 0.5 * (t2 - t1) * std::sin(t) + 0.5 * (t2 + t1));
            }
            break;
        }
        case SamplingPolicy::Kind::explicit_times: {
            times = policy.times;
            if (times.empty() || times.back() < horizon) {
                throw InvalidInput("explicit sampling sequence is shorter than the horizon");
            }
            break;
        }
    }
    return SamplingSequence(std::move(times), timing);
}

ErrorInit PlantInit::to_error(const PlantModel& plant) const {
    require_vector(z, plant.nz(), "z0");
    require_vector(zhat, plant.nz(), "zhat0");
    require_vector(theta, plant.ny(), "theta0");
    ErrorInit e;
    e.eps = z - zhat;
    e.theta_tilde = plant.C() * e.eps - theta;
    e.tau = tau;
    return e;
}

Vector HybridArc::state_at(double t, int j) const {
    for (const auto& iv : intervals) {
        if (iv.j == j) {
            if (t < iv.t_start || t > iv.t_end) {
                throw InvalidInput("time outside the flow interval of the requested jump index");
            }
            return expm(flow * (t - iv.t_start)) * iv.x_start;
        }
    }
    throw InvalidInput("jump index not in the hybrid time domain");
}

HybridState HybridArc::error_state(const ArcPoint& p, const Matrix& c) const {
    HybridState s;
    s.tau = p.tau;
    if (coordinates == Coordinates::error) {
        s.eps = p.x.head(nz);
        s.theta_tilde = p.x.tail(ny);
    } else {
        s.eps = p.x.head(nz) - p.x.segment(nz, nz);
        s.theta_tilde = c * s.eps - p.x.tail(ny);
    }
    return s;
}

HybridArc simulate_error(const PlantModel& plant, const ObserverGains& gains, const ErrorInit& init,
                         const SamplingSequence& sampling, double horizon, const SimulationOptions& options) {
    require_vector(init.eps, plant.nz(), "eps0");
    require_vector(init.theta_tilde, plant.ny(), "theta_tilde0");
    const ErrorDynamics dyn = build_error_dynamics(plant, gains);
    Vector x0(plant.nz() + plant.ny());
    x0 << init.eps, init.theta_tilde;
    return run({dyn.flow, dyn.jump}, HybridArc::Coordinates::error, plant.nz(), plant.ny(), x0, init.tau, sampling,
               horizon, options);
}

HybridArc simulate_plant(const PlantModel& plant, const ObserverGains& gains, const PlantInit& init,
                         const SamplingSequence& sampling, double horizon, const SimulationOptions& options) {
    gains.check_against(plant);
    require_vector(init.z, plant.nz(), "z0");
    require_vector(init.zhat, plant.nz(), "zhat0");
    require_vector(init.theta, plant.ny(), "theta0");
    const int nz = plant.nz();
    const int ny = plant.ny();
    const Matrix& a = plant.A();
    const Matrix& c = plant.C();
    const Matrix& f = gains.F();
    const Matrix iz = Matrix::Identity(nz, nz);
    const Matrix icf = Matrix::Identity(ny, ny) - c * f;

    Hybrid sys;
    sys.flow = Matrix::Zero(2 * nz + ny, 2 * nz + ny);
    sys.flow.block(0, 0, nz, nz) = a;
    sys.flow.block(nz, nz, nz, nz) = a;
    sys.flow.block(nz, 2 * nz, nz, ny) = gains.L();
    sys.flow.block(2 * nz, 2 * nz, ny, ny) = gains.H();

    // z⁺ = z, ẑ⁺ = ẑ + F(Cz − Cẑ), θ⁺ = (I − CF)(Cz − Cẑ)
    sys.jump = Matrix::Zero(2 * nz + ny, 2 * nz + ny);
    sys.jump.block(0, 0, nz, nz) = iz;
    sys.jump.block(nz, 0, nz, nz) = f * c;
    sys.jump.block(nz, nz, nz, nz) = iz - f * c;
    sys.jump.block(2 * nz, 0, ny, nz) = icf * c;
    sys.jump.block(2 * nz, nz, ny, nz) = -icf * c;

    Vector x0(2 * nz + ny);
    x0 << init.z, init.zhat, init.theta;
    return run(sys, HybridArc::Coordinates::plant_observer, nz, ny, x0, init.tau, sampling, horizon, options);
}

HybridArc to_error_coordinates(const HybridArc& arc, const PlantModel& plant) {
    if (arc.coordinates == HybridArc::Coordinates::error) {
        return arc;
    }
    const int nz = arc.nz;
    const int ny = arc.ny;
    require_shape(plant.C(), ny, nz, "C");
    // (ε, θ̃) = T (z, ẑ, θ) with T = [[I, −I, 0], [C, −C, −I]]
    Matrix tm = Matrix::Zero(nz + ny, 2 * nz + ny);
    tm.block(0, 0, nz, nz) = Matrix::Identity(nz, nz);
    tm.block(0, nz, nz, nz) = -Matrix::Identity(nz, nz);
    tm.block(nz, 0, ny, nz) = plant.C();
    tm.block(nz, nz, ny, nz) = -plant.C();
    tm.block(nz, 2 * nz, ny, ny) = -Matrix::Identity(ny, ny);

    HybridArc out = arc;
    out.coordinates = HybridArc::Coordinates::error;
    // T has full row rank, so T·W·T⁺ is the error flow matrix.
    const Matrix pinv = tm.transpose() * (tm * tm.transpose()).inverse();
    out.flow = tm * arc.flow * pinv;
    for (auto& iv : out.intervals) {
        iv.x_start = tm * iv.x_start;
        for (auto& p : iv.points) {
            p.x = tm * p.x;
        }
    }
    for (auto& jr : out.jumps) {
        jr.pre = tm * jr.pre;
        jr.post = tm * jr.post;
    }
    return out;
}

Vector integrate_flow_rk(const Matrix& flow, const Vector& x0, double t, double rel_tol) {
    using State = std::vector<double>;
    namespace ode = boost::numeric::odeint;
    if (flow.rows() != flow.cols() || flow.rows() != x0.size()) {
        throw DimensionError("integrate_flow_rk: flow matrix and state do not match");
    }
    State x(x0.data(), x0.data() + x0.size());
    auto rhs = [&flow](const State& s, State& ds, double) {
        Eigen::Map<const Vector> sv(s.data(), static_cast<Eigen::Index>(s.size()));
        Eigen::Map<Vector> dv(ds.data(), static_cast<Eigen::Index>(ds.size()));
        dv = flow * sv;
    };
    if (t > 0.0) {
        auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(rel_tol * 1e-3, rel_tol);
        ode::integrate_adaptive(stepper, rhs, x, 0.0, t, t / 100.0);
    }
    return Eigen::Map<Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

CostEvaluation evaluate_cost(const HybridArc& arc, const DesignWeights& weights) {
    if (arc.coordinates != HybridArc::Coordinates::error) {
        throw InvalidInput("evaluate_cost needs an arc in error coordinates");
    }
    require_shape(weights.QF, arc.nz, arc.nz, "Q_F");
    require_shape(weights.QJ, arc.nz, arc.nz, "Q_J");
    using boost::math::quadrature::gauss_kronrod;

    CostEvaluation cost;
    for (const auto& iv : arc.intervals) {
        const double len = iv.t_end - iv.t_start;
        if (!(len > 0.0)) {
            continue;
        }
        auto integrand = [&](double s) {
            const Vector x = expm(arc.flow * s) * iv.x_start;
            const auto eps = x.head(arc.nz);
            return eps.dot(weights.QF * eps);
        };
        double err = 0.0;
        cost.flow_cost += gauss_kronrod<double, 15>::integrate(integrand, 0.0, len, 15, 1e-12, &err);
        cost.quadrature_error_estimate += err;
    }
    for (const auto& jr : arc.jumps) {
        const auto eps = jr.pre.head(arc.nz);
        cost.jump_cost += eps.dot(weights.QJ * eps);
    }
    cost.total = cost.flow_cost + cost.jump_cost;
    return cost;
}

MonotonicityReport check_lyapunov_monotonicity(const HybridArc& arc, const PlantModel& plant,
                                               const LyapunovCertificate& cert, const TimingBounds& timing,
                                               double tolerance) {
    MonotonicityReport rep;
    rep.tolerance = tolerance;
    auto rel_increase = [](double before, double after) {
        const double scale = std::max(std::abs(before), std::numeric_limits<double>::min());
        return after > before ? (after - before) / scale : 0.0;
    };

    std::vector<double> ts;
    std::vector<double> js;
    std::vector<double> logv;
    for (const auto& iv : arc.intervals) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (const auto& p : iv.points) {
            const double v = evaluate_V(cert, arc.error_state(p, plant.C()), timing);
            if (!std::isnan(prev)) {
                const double r = rel_increase(prev, v);
                if (r > rep.worst_flow_violation) {
                    rep.worst_flow_violation = r;
                    if (r > tolerance && rep.flow_monotone) {
                        rep.violation_t = p.t;
                        rep.violation_j = p.j;
                    }
                }
                if (r > tolerance) {
                    rep.flow_monotone = false;
                }
            }
            prev = v;
            if (v > 0.0) {
                ts.push_back(p.t);
                js.push_back(p.j);
                logv.push_back(std::log(v));
            }
        }
    }
    for (const auto& jr : arc.jumps) {
        ArcPoint pre{jr.t, jr.j - 1, 0.0, jr.pre};
        ArcPoint post{jr.t, jr.j, jr.tau_post, jr.post};
        const double v_pre = evaluate_V(cert, arc.error_state(pre, plant.C()), timing);
        const double v_post = evaluate_V(cert, arc.error_state(post, plant.C()), timing);
        const double r = rel_increase(v_pre, v_post);
        rep.worst_jump_violation = std::max(rep.worst_jump_violation, r);
        if (r > tolerance) {
            if (rep.jumps_nonincreasing && rep.flow_monotone) {
                rep.violation_t = jr.t;
                rep.violation_j = jr.j;
            }
            rep.jumps_nonincreasing = false;
        }
    }

    if (logv.size() >= 2) {
        Matrix design(static_cast<Eigen::Index>(logv.size()), 3);
        Vector rhs(static_cast<Eigen::Index>(logv.size()));
        for (std::size_t i = 0; i < logv.size(); ++i) {
            design.row(static_cast<Eigen::Index>(i)) << 1.0, ts[i], js[i];
            rhs(static_cast<Eigen::Index>(i)) = logv[i];
        }
        const Vector coef = design.colPivHouseholderQr().solve(rhs);
        rep.chi_c_hat = -0.5 * coef(1);
        rep.chi_d_hat = -0.5 * coef(2);
    }
    return rep;
}

GesEnvelope fit_ges_envelope(const HybridArc& arc, const PlantModel& plant, const TimingBounds& timing) {
    if (arc.intervals.empty() || arc.intervals.front().points.empty()) {
        throw InvalidInput("arc has no recorded points");
    }
    std::vector<double> s;
    std::vector<double> d;
    for (const auto& iv : arc.intervals) {
        for (const auto& p : iv.points) {
            s.push_back(p.t + p.j);
            d.push_back(distance_to_attractor(arc.error_state(p, plant.C()), timing));
        }
    }
    const double d0 = d.front();
    if (!(d0 > 0.0)) {
        throw InvalidInput("initial distance to the attractor is zero; the envelope is undefined");
    }

    // ln d ≈ a − λ s over the points with d > 0.
    double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (d[i] > 0.0) {
            const double y = std::log(d[i] / d0);
            n += 1.0;
            sx += s[i];
            sy += y;
            sxx += s[i] * s[i];
            sxy += s[i] * y;
        }
    }
    GesEnvelope env;
    const double var = n * sxx - sx * sx;
    const double slope = var > 0.0 ? (n * sxy - sx * sy) / var : 0.0;
    env.lambda = -slope > 1e-12 ? -slope : 0.0;
    env.exponentially_decaying = env.lambda > 0.0;
    env.k = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        env.k = std::max(env.k, d[i] / d0 * std::exp(env.lambda * s[i]));
    }
    return env;
}

void write_arc_csv(std::ostream& os, const HybridArc& arc, const PlantModel& plant, const TimingBounds& timing,
                   const LyapunovCertificate* cert) {
    os << "t,j";
    for (int i = 1; i <= arc.nz; ++i) os << ",eps_" << i;
    for (int i = 1; i <= arc.ny; ++i) os << ",theta_tilde_" << i;
    os << ",tau,dist";
    if (cert) os << ",V";
    os << "\n";
    for (const auto& iv : arc.intervals) {
        for (const auto& p : iv.points) {
            const HybridState x = arc.error_state(p, plant.C());
            os << format_real(p.t) << "," << p.j;
            for (Eigen::Index i = 0; i < x.eps.size(); ++i) os << "," << format_real(x.eps(i));
            for (Eigen::Index i = 0; i < x.theta_tilde.size(); ++i) os << "," << format_real(x.theta_tilde(i));
            os << "," << format_real(p.tau) << "," << format_real(distance_to_attractor(x, timing));
            if (cert) os << "," << format_real(evaluate_V(*cert, x, timing));
            os << "\n";
        }
    }
}

void write_jumps_csv(std::ostream& os, const HybridArc& arc) {
    const auto names = state_names(arc);
    os << "t,j";
    for (const auto& n : names) os << ",pre_" << n;
    for (const auto& n : names) os << ",post_" << n;
    os << ",tau_post\n";
    for (const auto& jr : arc.jumps) {
        os << format_real(jr.t) << "," << jr.j;
        for (Eigen::Index i = 0; i < jr.pre.size(); ++i) os << "," << format_real(jr.pre(i));
        for (Eigen::Index i = 0; i < jr.post.size(); ++i) os << "," << format_real(jr.post(i));
        os << "," << format_real(jr.tau_post) << "\n";
    }
}

}  // namespace hyobs
