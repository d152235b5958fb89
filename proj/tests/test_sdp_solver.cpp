#include "doctest.h"
#include "hyobs/sdp_solver.hpp"

using namespace hyobs;
using namespace hyobs::lmi;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("backend: max-cut style relaxation") {
    // max ⟨W, X⟩ s.t. diag(X) = 1, X ⪰ 0 for the 3-cycle; optimum 9/4·... checked via duality.
    Matrix w(3, 3);
    w << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    LmiProblem p;
    auto X = p.add_symmetric("X", 3);
    p.add_constraint("X psd", X, ConstraintKind::positive_semidefinite);
    for (int i = 0; i < 3; ++i) {
        Matrix e = Matrix::Zero(1, 3);
        e(0, i) = 1.0;
        p.add_equality("diag" + std::to_string(i), e * AffineExpr(X) * Matrix(e.transpose()), scalar(1.0));
    }
    p.minimize(trace(w * AffineExpr(X)));
    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::optimal);
    // Off-diagonals all −1/2 at the optimum.
    CHECK(*out.objective_value == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("backend: minimum eigenvalue as an SDP") {
    Matrix m(3, 3);
    m << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    LmiProblem p;
    auto t = p.add_scalar("t");
    p.add_constraint("M - tI >= 0", AffineExpr(m) - scaled_identity(AffineExpr(t), 3),
                     ConstraintKind::positive_semidefinite);
    p.minimize(-AffineExpr(t));
    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::optimal);
    CHECK(out.value("t")(0, 0) == doctest::Approx(lambda_min(m)).epsilon(1e-7));
}

TEST_CASE("backend: unbounded objective is not reported as optimal") {
    LmiProblem p;
    auto t = p.add_scalar("t");
    p.add_constraint("t <= 1", scalar(1.0) - AffineExpr(t), ConstraintKind::positive_semidefinite);
    p.minimize(AffineExpr(t));
    const SolveOutcome out = solve(p);
    CHECK(out.status != SolveStatus::optimal);
}

TEST_CASE("backend: inconsistent equalities") {
    LmiProblem p;
    auto t = p.add_scalar("t");
    p.add_constraint("t >= 0", t, ConstraintKind::positive_semidefinite);
    p.add_equality("t = 1", t, scalar(1.0));
    p.add_equality("t = 2", t, scalar(2.0));
    CHECK(solve(p).status == SolveStatus::infeasible);
}

TEST_CASE("backend: variables fixed entirely by equalities") {
    LmiProblem p;
    auto t = p.add_scalar("t");
    p.add_constraint("t >= 0", t, ConstraintKind::positive_semidefinite);
    p.add_equality("t = 2", t, scalar(2.0));
    p.minimize(AffineExpr(t));
    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::optimal);
    CHECK(out.value("t")(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("backend: options are validated") {
    InteriorPointBackend backend;
    ConicForm form;
    SolverOptions bad;
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(backend.solve(form, bad), InvalidInput);
}
