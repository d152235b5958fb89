#include <cmath>

#include "doctest.h"
#include "hyobs/synthesis.hpp"

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

}  // namespace

TEST_CASE("design weights") {
    DesignWeights w = DesignWeights::defaults(2, 100, 1);
    CHECK(w.QF.isApprox(Matrix::Identity(2, 2)));
    CHECK(w.QJ.isApprox(0.01 * Matrix::Identity(2, 2)));
    CHECK_NOTHROW(w.validate(2));
    CHECK_THROWS_AS(w.validate(3), InvalidInput);
    w.alpha1 = -1;
    CHECK_THROWS_AS(w.validate(2), InvalidInput);
    w = DesignWeights::defaults(2);
    w.QF(0, 0) = -1;
    CHECK_THROWS_AS(w.validate(2), InvalidInput);
}

TEST_CASE("assemble_R") {
    TimingBounds timing(0.5, 1.0);
    PlantModel plant(scalar(-1), scalar(1));
    DesignWeights w = DesignWeights::defaults(1);
    w.QF = scalar(1);

    SUBCASE("scalar hand substitution") {
        Matrix r = assemble_R(plant, scalar(1), scalar(1), scalar(-1), scalar(0), 0.0, 1.0, w, 1, timing);
        Matrix expected(2, 2);
        expected << -1, 0, 0, -2;
        CHECK((r - expected).norm() < 1e-15);
    }
    SUBCASE("vertices coincide at delta = 0") {
        Matrix r1 = assemble_R(plant, scalar(2), scalar(0.5), scalar(0.3), scalar(0.7), 0.0, 0.2, w, 1, timing);
        Matrix r2 = assemble_R(plant, scalar(2), scalar(0.5), scalar(0.3), scalar(0.7), 0.0, 0.2, w, 2, timing);
        CHECK((r1 - r2).norm() < 1e-15);
    }
    SUBCASE("vertex index is validated") {
        CHECK_THROWS_AS(assemble_R(plant, scalar(1), scalar(1), scalar(0), scalar(0), 0.1, 0.1, w, 3, timing),
                        InvalidInput);
    }
}

TEST_CASE("design jump block") {
    PlantModel plant(scalar(0), scalar(1));
    SUBCASE("scalar hand substitution") {
        Matrix j = assemble_design_jump_lmi(plant, scalar(2), scalar(2), scalar(0.02), 0.0, TimingBounds(1.0, 1.0));
        Matrix expected(2, 2);
        expected << -1.98, 0, 0, -2;
        CHECK((j - expected).norm() < 1e-14);
    }
    SUBCASE("reduces to the analysis block with Q_J = 0 and Z = P1 F") {
        PlantModel p2 = oscillator();
        Matrix p1(2, 2);
        p1 << 3, 0.5, 0.5, 2;
        Matrix f(2, 1);
        f << 0.2, -0.4;
        TimingBounds timing(0.5, 1.1);
        LyapunovCertificate cert(p1, scalar(1), 0.03, 1e-4);
        Matrix design = assemble_design_jump_lmi(p2, p1, p1 * f, Matrix::Zero(2, 2), 0.03, timing);
        Matrix analysis = assemble_jump_lmi(p2, f, cert, timing);
        CHECK((design - analysis).norm() < 1e-13);
    }
}

TEST_CASE("recover_gains") {
    SUBCASE("hand inversion") {
        ObserverGains g = recover_gains(scalar(2), scalar(3), scalar(6), scalar(1), scalar(4), scalar(1));
        CHECK(g.L()(0, 0) == doctest::Approx(0.5));
        CHECK(g.F()(0, 0) == doctest::Approx(2.0));
        CHECK(g.H()(0, 0) == doctest::Approx(1.5));
    }
    SUBCASE("identity weights") {
        Matrix c(1, 2);
        c << 0.5, -1;
        Matrix y(2, 1);
        y << 1, 2;
        Matrix z(2, 1);
        z << -3, 4;
        ObserverGains g = recover_gains(Matrix::Identity(2, 2), scalar(1), scalar(5), y, z, c);
        CHECK((g.L() - y).norm() < 1e-15);
        CHECK((g.F() - z).norm() < 1e-15);
        CHECK((g.H() - (scalar(5) - c * y)).norm() < 1e-15);
    }
    SUBCASE("ill-conditioned weights are rejected") {
        Matrix p1 = Matrix::Identity(2, 2);
        p1(1, 1) = 1e-14;
        CHECK_THROWS_AS(recover_gains(p1, scalar(1), scalar(0), Matrix::Zero(2, 1), Matrix::Zero(2, 1),
                                      Matrix::Ones(1, 2)),
                        InvalidInput);
    }
}

TEST_CASE("design on the oscillator with a short sampling bound") {
    PlantModel plant = oscillator();
    TimingBounds timing(0.5, 0.6);
    DesignWeights w = DesignWeights::defaults(2, 100, 1);
    DesignOutcome d = design_optimal(plant, timing, w, 0.03, 1e-4);
    REQUIRE(d.status == lmi::SolveStatus::optimal);
    REQUIRE(d.result);
    const DesignResult& r = *d.result;

    CHECK(r.report.feasible);
    CHECK(r.trace_P1 == doctest::Approx(r.certificate.P1().trace()));
    CHECK(r.objective >= r.trace_P1);
    CHECK(r.raw.gamma1);
    CHECK(r.raw.gamma2);

    for (int vertex : {1, 2}) {
        Matrix rv = assemble_R(plant, r.certificate.P1(), r.certificate.P2(), r.raw.X, r.raw.Y, 0.03, 1e-4, w, vertex,
                               timing);
        CHECK(lambda_max(rv) < 0.0);
    }
    CHECK(lambda_max(assemble_design_jump_lmi(plant, r.certificate.P1(), r.raw.Z, w.QJ, 0.03, timing)) <= 1e-7);

    ObserverGains again = recover_gains(r.certificate.P1(), r.certificate.P2(), r.raw.X, r.raw.Y, r.raw.Z, plant.C());
    CHECK((again.L() - r.gains.L()).norm() == 0.0);
    CHECK((again.F() - r.gains.F()).norm() == 0.0);
    CHECK((again.H() - r.gains.H()).norm() == 0.0);

    GainNormCheck norms = gain_norm_constraints_hold(r);
    CHECK(norms.holds);
    REQUIRE(norms.margin1);
    CHECK(*norms.margin1 >= 0.0);

    DesignResult halved = r;
    halved.raw.gamma1 = *r.raw.gamma1 / 2;
    CHECK_FALSE(gain_norm_constraints_hold(halved).holds);

    SUBCASE("cost bound is the value of V") {
        HybridState xi{Vector::Unit(2, 0) * 10, Vector::Zero(1), 0.0};
        CHECK(r.cost_bound(xi, timing) == doctest::Approx(100 * r.certificate.P1()(0, 0)));
    }
}

TEST_CASE("unconstrained design has no gain-norm variables") {
    DesignOutcome d = design_optimal(oscillator(), TimingBounds(0.5, 0.6), DesignWeights::defaults(2), 0.03, 1e-4);
    REQUIRE(d.result);
    CHECK_FALSE(d.result->raw.gamma1);
    CHECK_FALSE(d.result->raw.gamma2);
    CHECK(d.result->objective == doctest::Approx(d.result->trace_P1).epsilon(1e-6));
}

TEST_CASE("grid search") {
    PlantModel plant = oscillator();
    TimingBounds timing(0.5, 0.6);
    DesignWeights w = DesignWeights::defaults(2, 100, 1);

    SUBCASE("single point equals the direct design") {
        GridReport g = grid_search(plant, timing, w, {0.03}, {1e-4});
        DesignOutcome d = design_optimal(plant, timing, w, 0.03, 1e-4);
        REQUIRE(g.best);
        REQUIRE(d.result);
        CHECK(g.table.size() == 1);
        CHECK(g.best->objective == d.result->objective);
        CHECK((g.best->gains.F() - d.result->gains.F()).norm() == 0.0);
    }
    SUBCASE("minimum over a set containing the point") {
        GridReport g = grid_search(plant, timing, w, {0.01, 0.03, 0.1}, {1e-4, 1e-2}, {}, 2);
        DesignOutcome d = design_optimal(plant, timing, w, 0.03, 1e-4);
        REQUIRE(g.best);
        REQUIRE(d.result);
        CHECK(g.table.size() == 6);
        CHECK(g.table[2].delta == 0.03);
        CHECK(g.table[2].eta == 1e-4);
        CHECK(g.best->objective <= d.result->objective);
    }
    SUBCASE("thread count does not change the outcome") {
        GridReport a = grid_search(plant, timing, w, {0.01, 0.1}, {1e-4, 1e-2}, {}, 1);
        GridReport b = grid_search(plant, timing, w, {0.01, 0.1}, {1e-4, 1e-2}, {}, 3);
        REQUIRE(a.best);
        REQUIRE(b.best);
        CHECK(a.best->objective == b.best->objective);
        CHECK(a.best->certificate.delta() == b.best->certificate.delta());
    }
    SUBCASE("unobservable plant is infeasible everywhere") {
        PlantModel bad(scalar(1), scalar(0));
        GridReport g = grid_search(bad, timing, DesignWeights::defaults(1, 1, 1), {0.01, 0.1}, {1e-4, 1e-2});
        CHECK_FALSE(g.best);
        for (const auto& e : g.table) CHECK(e.status == lmi::SolveStatus::infeasible);
    }
}

TEST_CASE("logspace") {
    auto v = logspace(1e-3, 1.0, 4);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == doctest::Approx(1e-3));
    CHECK(v[1] == doctest::Approx(1e-2));
    CHECK(v[3] == doctest::Approx(1.0));
    CHECK_THROWS_AS(logspace(0.0, 1.0, 3), InvalidInput);
}
