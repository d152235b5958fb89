#include "hyobs/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hyobs/detail/blocks.hpp"

namespace hyobs {

namespace {

// Largest admissible ϖ_d; keeps χ_d finite.
constexpr double kVarpiGuard = 1.0 - 16.0 * std::numeric_limits<double>::epsilon();

void check_certificate_matrix(Matrix& p, const std::string& name) {
    require_finite(p, name);
    if (p.rows() != p.cols() || p.rows() < 1) {
        throw DimensionError(name + " must be square and non-empty");
    }
    const double scale = 1.0 + p.cwiseAbs().maxCoeff();
    if (!is_symmetric(p, 1e-9 * scale)) {
        throw InvalidInput(name + " must be symmetric");
    }
    p = symmetrize(p);
    const double lmin = lambda_min(p);
    if (!(lmin > 0.0)) {
        std::ostringstream os;
        os << name << " must be positive definite (minimum eigenvalue " << lmin << ")";
        throw InvalidInput(os.str());
    }
}

void check_plant_certificate(const PlantModel& plant, const LyapunovCertificate& cert) {
    require_shape(cert.P1(), plant.nz(), plant.nz(), "P1");
    require_shape(cert.P2(), plant.ny(), plant.ny(), "P2");
}

}  // namespace

LyapunovCertificate::LyapunovCertificate(Matrix p1, Matrix p2, double delta, double eta)
    : p1_(std::move(p1)), p2_(std::move(p2)), delta_(delta), eta_(eta) {
    check_certificate_matrix(p1_, "P1");
    check_certificate_matrix(p2_, "P2");
    if (!std::isfinite(delta) || delta < 0.0) {
        throw InvalidInput("delta must be finite and non-negative");
    }
    if (!std::isfinite(eta) || !(eta > 0.0)) {
        throw InvalidInput("eta must be finite and positive");
    }
}

double mu_of_tau(const LyapunovCertificate& cert, double tau) {
    return (1.0 + cert.eta()) * std::exp(cert.delta() * tau) - 1.0;
}

std::pair<double, double> vertex_mus(const LyapunovCertificate& cert, const TimingBounds& timing) {
    return {cert.eta(), mu_of_tau(cert, timing.T2())};
}

Matrix assemble_M(const PlantModel& plant, const ObserverGains& gains, const LyapunovCertificate& cert, double mu) {
    gains.check_against(plant);
    check_plant_certificate(plant, cert);
    if (!(mu >= 0.0)) {
        throw InvalidInput("mu must be non-negative");
    }
    const Matrix y = cert.P1() * gains.L();
    const Matrix x = cert.P2() * (plant.C() * gains.L() + gains.H());
    return symmetrize(detail::flow_block<Matrix>(plant.A(), plant.C(), cert.P1(), cert.P2(), y, x, cert.delta(), mu));
}

Matrix assemble_jump_lmi(const PlantModel& plant, const Matrix& f, const LyapunovCertificate& cert,
                         const TimingBounds& timing) {
    require_shape(f, plant.nz(), plant.ny(), "F");
    check_plant_certificate(plant, cert);
    const Matrix z = cert.P1() * f;
    const Matrix zero = Matrix::Zero(plant.nz(), plant.nz());
    return symmetrize(detail::jump_block<Matrix>(plant.C(), cert.P1(), z, zero, cert.delta(), timing.T1()));
}

Matrix jump_schur_complement(const PlantModel& plant, const Matrix& f, const LyapunovCertificate& cert,
                             const TimingBounds& timing) {
    require_shape(f, plant.nz(), plant.ny(), "F");
    check_plant_certificate(plant, cert);
    const Matrix m = Matrix::Identity(plant.nz(), plant.nz()) - f * plant.C();
    return symmetrize(std::exp(-cert.delta() * timing.T1()) * m.transpose() * cert.P1() * m - cert.P1());
}

double evaluate_V(const LyapunovCertificate& cert, const HybridState& x, const TimingBounds& timing) {
    check_in_domain(x, timing);
    require_shape(x.eps, cert.P1().rows(), 1, "eps");
    require_shape(x.theta_tilde, cert.P2().rows(), 1, "theta_tilde");
    const double decay = std::exp(-cert.delta() * x.tau);
    const double v1 = x.eps.dot(cert.P1() * x.eps);
    const double v2 = x.theta_tilde.dot(cert.P2() * x.theta_tilde);
    return decay * v1 + (1.0 + cert.eta() - decay) * v2;
}

double flow_derivative_V(const PlantModel& plant, const ObserverGains& gains, const LyapunovCertificate& cert,
                         const HybridState& x, const TimingBounds& timing) {
    check_in_domain(x, timing);
    const Vector xi = x.stacked();
    const Matrix m = assemble_M(plant, gains, cert, mu_of_tau(cert, x.tau));
    return std::exp(-cert.delta() * x.tau) * xi.dot(m * xi);
}

SectorBounds sector_bounds(const LyapunovCertificate& cert, const TimingBounds& timing) {
    const double decay = std::exp(-cert.delta() * timing.T2());
    SectorBounds s;
    s.alpha2 = lambda_max(cert.P1());
    s.alpha1 = decay * lambda_min(cert.P1());
    s.omega1 = cert.eta() * lambda_min(cert.P2());
    s.omega2 = (1.0 - decay + cert.eta()) * lambda_max(cert.P2());
    return s;
}

namespace {

double jump_tolerance(const LyapunovCertificate& cert, const TimingBounds& timing) {
    return 1e-9 * (1.0 + lambda_max(cert.P1()) * std::exp(cert.delta() * timing.T1()));
}

JumpContraction contraction_from(double lmax_q, double alpha2) {
    JumpContraction j;
    j.lambda_max_Q = lmax_q;
    j.varpi_d = lmax_q < 0.0 ? std::min(-lmax_q / alpha2, kVarpiGuard) : 0.0;
    j.chi_d = -0.5 * std::log(1.0 - j.varpi_d);
    return j;
}

}  // namespace

JumpContraction compute_varpi_d(const PlantModel& plant, const Matrix& f, const LyapunovCertificate& cert,
                                const TimingBounds& timing) {
    const double lmax_q = lambda_max(jump_schur_complement(plant, f, cert, timing));
    if (lmax_q > jump_tolerance(cert, timing)) {
        std::ostringstream os;
        os << "jump condition violated: lambda_max(Q) = " << lmax_q << " > 0";
        throw InvalidInput(os.str());
    }
    return contraction_from(lmax_q, lambda_max(cert.P1()));
}

CertificateReport make_report(const PlantModel& plant, const ObserverGains& gains, const LyapunovCertificate& cert,
                              const TimingBounds& timing) {
    CertificateReport r;
    const auto [mu1, mu2] = vertex_mus(cert, timing);
    r.mu1 = mu1;
    r.mu2 = mu2;
    r.flow_vertex_eigs[0] = lambda_max(assemble_M(plant, gains, cert, mu1));
    r.flow_vertex_eigs[1] = lambda_max(assemble_M(plant, gains, cert, mu2));
    r.jump_eig = lambda_max(assemble_jump_lmi(plant, gains.F(), cert, timing));
    r.jump_tolerance = jump_tolerance(cert, timing);
    r.p1_min_eig = lambda_min(cert.P1());
    r.p2_min_eig = lambda_min(cert.P2());
    r.sector = sector_bounds(cert, timing);
    r.jump = contraction_from(lambda_max(jump_schur_complement(plant, gains.F(), cert, timing)), r.sector.alpha2);
    r.feasible = r.flow_vertex_eigs[0] < 0.0 && r.flow_vertex_eigs[1] < 0.0 && r.jump_eig <= r.jump_tolerance;
    return r;
}

VerifyOutcome verify_gains(const PlantModel& plant, const ObserverGains& gains, const TimingBounds& timing,
                           double delta, double eta, const lmi::SolverOptions& options) {
    using lmi::AffineExpr;
    using lmi::ConstraintKind;
    gains.check_against(plant);
    if (!std::isfinite(delta) || !(delta > 0.0)) {
        throw InvalidInput("delta must be positive");
    }
    if (!std::isfinite(eta) || !(eta > 0.0)) {
        throw InvalidInput("eta must be positive");
    }
    const int nz = plant.nz();
    const int ny = plant.ny();
    const double mu1 = eta;
    const double mu2 = (1.0 + eta) * std::exp(delta * timing.T2()) - 1.0;

    lmi::LmiProblem problem;
    const AffineExpr p1 = problem.add_symmetric("P1", nz);
    const AffineExpr p2 = problem.add_symmetric("P2", ny);
    const AffineExpr y = p1 * gains.L();
    const AffineExpr x = p2 * Matrix(plant.C() * gains.L() + gains.H());
    const AffineExpr z = p1 * gains.F();

    problem.add_constraint("P1 > 0", p1, ConstraintKind::positive_definite);
    problem.add_constraint("P2 > 0", p2, ConstraintKind::positive_definite);
    problem.add_constraint("M(mu1) < 0", detail::flow_block(plant.A(), plant.C(), p1, p2, y, x, delta, mu1),
                           ConstraintKind::negative_definite);
    problem.add_constraint("M(mu2) < 0", detail::flow_block(plant.A(), plant.C(), p1, p2, y, x, delta, mu2),
                           ConstraintKind::negative_definite);
    problem.add_constraint("jump <= 0",
                           detail::jump_block(plant.C(), p1, z, Matrix::Zero(nz, nz), delta, timing.T1()),
                           ConstraintKind::negative_semidefinite);
    problem.add_equality("trace(P1) + trace(P2)", lmi::trace(p1) + lmi::trace(p2),
                         Matrix::Constant(1, 1, static_cast<double>(nz + ny)));

    const lmi::SolveOutcome solved = lmi::solve(problem, options);
    VerifyOutcome out;
    out.status = solved.status;
    out.residuals = solved.residuals;
    out.diagnostics = solved.solver_diagnostics;
    if (!solved.ok()) {
        return out;
    }
    const Matrix p1v = symmetrize(solved.value("P1"));
    const Matrix p2v = symmetrize(solved.value("P2"));
    for (const auto& [name, p] : {std::pair<const char*, const Matrix*>{"P1", &p1v}, {"P2", &p2v}}) {
        const double lmin = lambda_min(*p);
        const double lmax = lambda_max(*p);
        if (!(lmin >= 1e-8 * lmax) || !(lmin > 0.0)) {
            std::ostringstream os;
            os << "; " << name << " is numerically singular (eigenvalues " << lmin << ", " << lmax << ")";
            out.status = lmi::SolveStatus::numerical_failure;
            out.diagnostics += os.str();
            return out;
        }
    }
    out.certificate.emplace(p1v, p2v, delta, eta);
    out.report = make_report(plant, gains, *out.certificate, timing);
    if (!out.report->feasible) {
        out.status = lmi::SolveStatus::numerical_failure;
        out.diagnostics += "; certificate does not re-verify at the returned point";
        out.certificate.reset();
    }
    return out;
}

}  // namespace hyobs
