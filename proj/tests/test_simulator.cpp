#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hyobs/simulator.hpp"

using namespace hyobs;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

PlantModel oscillator() {
    Matrix a(2, 2);
    a << 0.2, -1.01, 1, 0;
    Matrix c(1, 2);
    c << 0.5, -1;
    return PlantModel(a, c);
}

ObserverGains small_f_gains() {
    Matrix f(2, 1);
    f << 0.183, -0.333;
    return ObserverGains(Matrix::Zero(2, 1), scalar(0), f);
}

// A single sample beyond the horizon: the arc is one flow interval.
SamplingSequence no_jumps(const TimingBounds& timing) {
    return generate_sampling(SamplingPolicy::explicit_times({5.0, 6.0}), timing, 3.0);
}

}  // namespace

TEST_CASE("sampling policies respect the gap bounds") {
    SUBCASE("periodic with T1 = T2") {
        TimingBounds timing(0.4, 0.4);
        SamplingSequence s = generate_sampling(SamplingPolicy::periodic(0.4), timing, 4.0);
        for (std::size_t k = 0; k < s.times().size(); ++k) {
            CHECK(s.times()[k] == doctest::Approx(0.4 * static_cast<double>(k + 1)));
        }
        CHECK(s.times().back() >= 4.0);
    }
    SUBCASE("sinusoidal") {
        TimingBounds timing(0.5, 1.1);
        SamplingSequence s = generate_sampling(SamplingPolicy::sinusoidal(), timing, 100.0);
        CHECK(s.times().front() == 0.0);
        for (std::size_t k = 1; k < s.times().size(); ++k) {
            const double gap = s.times()[k] - s.times()[k - 1];
            CHECK(gap >= 0.5 - 1e-12);
            CHECK(gap <= 1.1 + 1e-12);
        }
    }
    SUBCASE("uniform random") {
        TimingBounds timing(0.5, 1.1);
        SamplingSequence s = generate_sampling(SamplingPolicy::uniform_random(42), timing, 800.0);
        REQUIRE(s.times().size() > 1000);
        double lo = INFINITY, hi = 0;
        for (std::size_t k = 1; k < s.times().size(); ++k) {
            lo = std::min(lo, s.times()[k] - s.times()[k - 1]);
            hi = std::max(hi, s.times()[k] - s.times()[k - 1]);
        }
        CHECK(lo >= 0.5);
        CHECK(hi <= 1.1);
        SamplingSequence again = generate_sampling(SamplingPolicy::uniform_random(42), timing, 800.0);
        CHECK(again.times() == s.times());
    }
    SUBCASE("invalid sequences are rejected") {
        TimingBounds timing(0.5, 1.1);
        CHECK_THROWS_AS(SamplingSequence({0.0, 0.3}, timing), InvalidInput);
        CHECK_THROWS_AS(SamplingSequence({0.0, 1.5}, timing), InvalidInput);
        CHECK_THROWS_AS(generate_sampling(SamplingPolicy::periodic(2.0), timing, 5.0), InvalidInput);
        CHECK_THROWS_AS(generate_sampling(SamplingPolicy::explicit_times({0.0, 1.0}), timing, 5.0), InvalidInput);
    }
}

TEST_CASE("the attractor is invariant") {
    PlantModel plant = oscillator();
    TimingBounds timing(0.5, 1.1);
    SamplingSequence s = generate_sampling(SamplingPolicy::sinusoidal(), timing, 10.0);
    HybridArc arc = simulate_error(plant, small_f_gains(), {Vector::Zero(2), Vector::Zero(1), 0.0}, s, 10.0);
    for (const auto& iv : arc.intervals) {
        for (const auto& p : iv.points) CHECK(distance_to_attractor(arc.error_state(p, plant.C()), timing) == 0.0);
    }
    CHECK(evaluate_cost(arc, DesignWeights::defaults(2)).total == 0.0);
    LyapunovCertificate cert(Matrix::Identity(2, 2), scalar(1), 0.03, 1e-4);
    CHECK(check_lyapunov_monotonicity(arc, plant, cert, timing).passed());
    std::ostringstream csv;
    write_arc_csv(csv, arc, plant, timing);
    CHECK(csv.str().rfind("t,j,eps_1,eps_2,theta_tilde_1,tau,dist\n", 0) == 0);
}

TEST_CASE("scalar plant without correction decays as exp(-t)") {
    PlantModel plant(scalar(-1), scalar(1));
    TimingBounds timing(0.5, 1.1);
    SamplingSequence s = generate_sampling(SamplingPolicy::periodic(0.7), timing, 5.0);
    HybridArc arc = simulate_error(plant, ObserverGains::zero(plant), {scalar(2), Vector::Zero(1), 0.7}, s, 5.0);
    CHECK(arc.jumps.size() == 7);
    for (const auto& iv : arc.intervals) {
        for (const auto& p : iv.points) {
            CHECK(std::abs(p.x(0) - 2 * std::exp(-p.t)) <= 1e-13);
        }
    }
    CHECK_THROWS_AS(simulate_error(plant, ObserverGains::zero(plant), {scalar(2), Vector::Zero(1), 0.2}, s, 5.0),
                    InvalidInput);
}

TEST_CASE("flow cost of a decaying scalar arc") {
    PlantModel plant(scalar(-1), scalar(1));
    TimingBounds timing(1.0, 10.0);
    HybridArc arc =
        simulate_error(plant, ObserverGains(scalar(0), scalar(-1), scalar(0)), {scalar(3), scalar(0), 5.0},
                       no_jumps(timing), 3.0);
    CHECK(arc.jumps.empty());
    DesignWeights w = DesignWeights::defaults(1);
    CostEvaluation c = evaluate_cost(arc, w);
    const double expected = 9.0 * (1 - std::exp(-6.0)) / 2;
    CHECK(std::abs(c.flow_cost - expected) <= 1e-10 * expected);
    CHECK(c.jump_cost == 0.0);

    GesEnvelope env = fit_ges_envelope(arc, plant, timing);
    CHECK(env.lambda == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(env.k == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(env.exponentially_decaying);
}

TEST_CASE("constant distance gives no decay") {
    PlantModel plant(scalar(0), scalar(1));
    TimingBounds timing(0.5, 1.1);
    SamplingSequence s = generate_sampling(SamplingPolicy::periodic(1.0), timing, 6.0);
    HybridArc arc = simulate_error(plant, ObserverGains::zero(plant), {scalar(1), scalar(0), 1.0}, s, 6.0);
    GesEnvelope env = fit_ges_envelope(arc, plant, timing);
    CHECK(env.lambda == 0.0);
    CHECK_FALSE(env.exponentially_decaying);
    HybridArc zero = simulate_error(plant, ObserverGains::zero(plant), {scalar(0), scalar(0), 1.0}, s, 6.0);
    CHECK_THROWS_AS(fit_ges_envelope(zero, plant, timing), InvalidInput);
}

TEST_CASE("plant/observer and error simulations agree") {
    PlantModel plant = oscillator();
    TimingBounds timing(0.5, 1.1);
    Matrix l(2, 1);
    l << 0.5, -0.2;
    Matrix f(2, 1);
    f << 0.1, -0.7;
    ObserverGains gains(l, scalar(-2), f);
    SamplingSequence s = generate_sampling(SamplingPolicy::uniform_random(3), timing, 12.0);
    PlantInit pinit{Vector::Unit(2, 0) * 10, Vector::Zero(2), scalar(5), s.times().front()};
    HybridArc direct = simulate_error(plant, gains, pinit.to_error(plant), s, 12.0);
    HybridArc mapped = to_error_coordinates(simulate_plant(plant, gains, pinit, s, 12.0), plant);
    REQUIRE(direct.intervals.size() == mapped.intervals.size());
    CHECK((direct.flow - mapped.flow).norm() < 1e-12);
    for (std::size_t i = 0; i < direct.intervals.size(); ++i) {
        const auto& a = direct.intervals[i].points;
        const auto& b = mapped.intervals[i].points;
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK((a[k].x - b[k].x).norm() <= 1e-10 * (1.0 + a[k].x.norm()));
        }
    }
}

TEST_CASE("exact flow matches Runge-Kutta") {
    PlantModel plant = oscillator();
    Matrix l(2, 1);
    l << 0.5, -0.2;
    const Matrix flow = build_error_dynamics(plant, ObserverGains(l, scalar(-2), Matrix::Zero(2, 1))).flow;
    Vector x0(3);
    x0 << 1, -2, 0.5;
    for (double t : {0.3, 1.1}) {
        Vector rk = integrate_flow_rk(flow, x0, t, 1e-11);
        Vector exact = expm(flow * t) * x0;
        CHECK((rk - exact).norm() <= 1e-8 * exact.norm());
    }
}

TEST_CASE("monotonicity fails for an unstable plant without a valid certificate") {
    PlantModel plant(scalar(1), scalar(1));
    TimingBounds timing(0.5, 1.1);
    SamplingSequence s = generate_sampling(SamplingPolicy::periodic(1.0), timing, 5.0);
    HybridArc arc = simulate_error(plant, ObserverGains::zero(plant), {scalar(1), scalar(0), 1.0}, s, 5.0);
    MonotonicityReport r =
        check_lyapunov_monotonicity(arc, plant, LyapunovCertificate(scalar(1), scalar(1), 0.1, 0.1), timing);
    CHECK_FALSE(r.passed());
    CHECK(r.worst_flow_violation > 1e-9);
}

TEST_CASE("jump table export") {
    PlantModel plant = oscillator();
    TimingBounds timing(0.5, 1.1);
    SamplingSequence s = generate_sampling(SamplingPolicy::sinusoidal(), timing, 3.0);
    HybridArc arc = simulate_error(plant, small_f_gains(), {Vector::Unit(2, 0) * 10, Vector::Zero(1), 0.0}, s, 3.0);
    std::ostringstream os;
    write_jumps_csv(os, arc);
    const std::string header = os.str().substr(0, os.str().find('\n'));
    CHECK(header ==
          "t,j,pre_eps_1,pre_eps_2,pre_theta_tilde_1,post_eps_1,post_eps_2,post_theta_tilde_1,tau_post");
    REQUIRE(!arc.jumps.empty());
    CHECK(arc.jumps.front().t == 0.0);
    CHECK(arc.jumps.front().post(2) == 0.0);
}
