#include <cmath>

#include "doctest.h"
#include "hyobs/model.hpp"

using namespace hyobs;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("plant and timing validation") {
    CHECK_THROWS_AS(PlantModel(Matrix::Zero(2, 3), Matrix::Zero(1, 2)), DimensionError);
    CHECK_THROWS_AS(PlantModel(Matrix::Zero(2, 2), Matrix::Zero(1, 3)), DimensionError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(PlantModel(bad, Matrix::Zero(1, 2)), InvalidInput);

    CHECK_NOTHROW(TimingBounds(0.5, 1.1));
    CHECK_NOTHROW(TimingBounds(1.0, 1.0));
    CHECK_THROWS_AS(TimingBounds(1.2, 1.1), InvalidInput);
    CHECK_THROWS_AS(TimingBounds(0.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(TimingBounds(0.5, INFINITY), InvalidInput);
}

TEST_CASE("gain shapes are checked against the plant") {
    PlantModel plant(Matrix::Zero(2, 2), Matrix::Zero(1, 2));
    ObserverGains ok(Matrix::Zero(2, 1), scalar(0), Matrix::Zero(2, 1));
    CHECK_NOTHROW(ok.check_against(plant));
    ObserverGains wrong(Matrix::Zero(3, 1), scalar(0), Matrix::Zero(3, 1));
    CHECK_THROWS_WITH_AS(wrong.check_against(plant), doctest::Contains("L"), DimensionError);
    CHECK_THROWS_AS(ObserverGains(Matrix::Zero(2, 1), Matrix::Zero(2, 2), Matrix::Zero(2, 1)), DimensionError);
}

TEST_CASE("error dynamics: all gains zero") {
    PlantModel plant(scalar(0), scalar(1));
    ErrorDynamics d = build_error_dynamics(plant, ObserverGains::zero(plant));
    CHECK(d.flow.isZero());
    Matrix g(2, 2);
    g << 1, 0, 0, 0;
    CHECK(d.jump.isApprox(g));
}

TEST_CASE("error dynamics: scalar hand evaluation") {
    PlantModel plant(scalar(-1), scalar(1));
    ErrorDynamics d = build_error_dynamics(plant, ObserverGains(scalar(1), scalar(-1), scalar(1)));
    Matrix f(2, 2);
    f << -2, 1, -1, 0;
    CHECK((d.flow - f).norm() == 0.0);
    CHECK(d.jump.isZero());
}

TEST_CASE("error dynamics: second-order plant keeps A - LC in the top-left block") {
    Matrix a(2, 2);
    a << 0.2, -1.01, 1, 0;
    Matrix c(1, 2);
    c << 0.5, -1;
    Matrix l(2, 1);
    l << 3.68, -24.47;
    Matrix f(2, 1);
    f << 0.040, -0.364;
    PlantModel plant(a, c);
    ErrorDynamics d = build_error_dynamics(plant, ObserverGains(l, scalar(-11.47), f));
    CHECK((d.flow.topLeftCorner(2, 2) - (a - l * c)).norm() < 1e-15);
    CHECK((d.flow.topRightCorner(2, 1) - l).norm() == 0.0);
    CHECK(d.flow(2, 2) == doctest::Approx((c * l)(0, 0) - 11.47));
    CHECK((d.jump.topLeftCorner(2, 2) - (Matrix::Identity(2, 2) - f * c)).norm() < 1e-15);
}

TEST_CASE("distance to the attractor") {
    TimingBounds timing(0.5, 1.1);
    CHECK(distance_to_attractor({Vector::Zero(2), Vector::Zero(1), 0.3}, timing) == 0.0);
    CHECK(distance_to_attractor({Vector::Unit(2, 0) * 3 + Vector::Unit(2, 1) * 4, Vector::Zero(1), 0.0}, timing) ==
          doctest::Approx(5.0));
    CHECK(distance_to_attractor({Vector::Unit(2, 0), Vector::Ones(1), 1.0}, timing) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(distance_to_attractor({Vector::Zero(2), Vector::Zero(1), 1.2}, timing), InvalidInput);
    CHECK_THROWS_AS(check_in_domain({Vector::Zero(2), Vector::Zero(1), -0.1}, timing), InvalidInput);
}
