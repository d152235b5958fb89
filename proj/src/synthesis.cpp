#include "hyobs/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <tuple>

#include "hyobs/detail/blocks.hpp"

namespace hyobs {

namespace {

void check_spd(const Matrix& m, int n, const std::string& name) {
    require_shape(m, n, n, name);
    require_finite(m, name);
    if (!is_symmetric(m, 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))) {
        throw InvalidInput(name + " must be symmetric");
    }
    if (!(lambda_min(m) > 0.0)) {
        throw InvalidInput(name + " must be positive definite");
    }
}

double condition_number(const Matrix& p) {
    const double lmin = lambda_min(p);
    return lmin > 0.0 ? lambda_max(p) / lmin : std::numeric_limits<double>::infinity();
}

}  // namespace

DesignWeights DesignWeights::defaults(int nz, double alpha1, double alpha2) {
    return {Matrix::Identity(nz, nz), 0.01 * Matrix::Identity(nz, nz), alpha1, alpha2};
}

void DesignWeights::validate(int nz) const {
    check_spd(QF, nz, "Q_F");
    check_spd(QJ, nz, "Q_J");
    if (!std::isfinite(alpha1) || alpha1 < 0.0) {
        throw InvalidInput("alpha1 must be finite and non-negative");
    }
    if (!std::isfinite(alpha2) || alpha2 < 0.0) {
        throw InvalidInput("alpha2 must be finite and non-negative");
    }
}

double DesignResult::cost_bound(const HybridState& xi, const TimingBounds& timing) const {
    return evaluate_V(certificate, xi, timing);
}

Matrix assemble_R(const PlantModel& plant, const Matrix& p1, const Matrix& p2, const Matrix& x, const Matrix& y,
                  double delta, double eta, const DesignWeights& weights, int vertex, const TimingBounds& timing) {
    const int nz = plant.nz();
    const int ny = plant.ny();
    require_shape(p1, nz, nz, "P1");
    require_shape(p2, ny, ny, "P2");
    require_shape(x, ny, ny, "X");
    require_shape(y, nz, ny, "Y");
    require_shape(weights.QF, nz, nz, "Q_F");
    if (vertex != 1 && vertex != 2) {
        throw InvalidInput("vertex index must be 1 or 2");
    }
    const double mu = vertex == 1 ? eta : (1.0 + eta) * std::exp(delta * timing.T2()) - 1.0;
    const double mu_tilde = vertex == 1 ? 1.0 : std::exp(delta * timing.T2());
    Matrix r = detail::flow_block<Matrix>(plant.A(), plant.C(), p1, p2, y, x, delta, mu);
    r.topLeftCorner(nz, nz) += mu_tilde * weights.QF;
    return symmetrize(r);
}

Matrix assemble_design_jump_lmi(const PlantModel& plant, const Matrix& p1, const Matrix& z, const Matrix& qj,
                                double delta, const TimingBounds& timing) {
    require_shape(p1, plant.nz(), plant.nz(), "P1");
    require_shape(z, plant.nz(), plant.ny(), "Z");
    require_shape(qj, plant.nz(), plant.nz(), "Q_J");
    return symmetrize(detail::jump_block<Matrix>(plant.C(), p1, z, qj, delta, timing.T1()));
}

ObserverGains recover_gains(const Matrix& p1, const Matrix& p2, const Matrix& x, const Matrix& y, const Matrix& z,
                            const Matrix& c) {
    const auto nz = p1.rows();
    const auto ny = p2.rows();
    require_shape(p1, nz, nz, "P1");
    require_shape(p2, ny, ny, "P2");
    require_shape(x, ny, ny, "X");
    require_shape(y, nz, ny, "Y");
    require_shape(z, nz, ny, "Z");
    require_shape(c, ny, nz, "C");
    for (const auto& [name, p] : {std::pair<const char*, const Matrix*>{"P1", &p1}, {"P2", &p2}}) {
        const double cond = condition_number(symmetrize(*p));
        if (!(cond <= 1e12)) {
            std::ostringstream os;
            os << name << " is too close to singular to invert (condition number " << cond << ")";
            throw InvalidInput(os.str());
        }
    }
    Eigen::LLT<Matrix> p1_llt(symmetrize(p1));
    Eigen::LLT<Matrix> p2_llt(symmetrize(p2));
    const Matrix l = p1_llt.solve(y);
    const Matrix f = p1_llt.solve(z);
    const Matrix h = p2_llt.solve(x) - c * l;
    return ObserverGains(l, h, f);
}

DesignOutcome design_optimal(const PlantModel& plant, const TimingBounds& timing, const DesignWeights& weights,
                             double delta, double eta, const lmi::SolverOptions& options) {
    using lmi::AffineExpr;
    using lmi::ConstraintKind;
    weights.validate(plant.nz());
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
    const double mu_tilde2 = std::exp(delta * timing.T2());

    lmi::LmiProblem problem;
    const AffineExpr p1 = problem.add_symmetric("P1", nz);
    const AffineExpr p2 = problem.add_symmetric("P2", ny);
    const AffineExpr x = problem.add_full("X", ny, ny);
    const AffineExpr y = problem.add_full("Y", nz, ny);
    const AffineExpr z = problem.add_full("Z", nz, ny);

    Matrix qf_embed = Matrix::Zero(nz + ny, nz + ny);
    qf_embed.topLeftCorner(nz, nz) = weights.QF;

    problem.add_constraint("P1 > 0", p1, ConstraintKind::positive_definite);
    problem.add_constraint("P2 > 0", p2, ConstraintKind::positive_definite);
    problem.add_constraint("R1 < 0", detail::flow_block(plant.A(), plant.C(), p1, p2, y, x, delta, mu1) + qf_embed,
                           ConstraintKind::negative_definite);
    problem.add_constraint("R2 < 0",
                           detail::flow_block(plant.A(), plant.C(), p1, p2, y, x, delta, mu2) + Matrix(mu_tilde2 * qf_embed),
                           ConstraintKind::negative_definite);
    problem.add_constraint("jump <= 0", detail::jump_block(plant.C(), p1, z, weights.QJ, delta, timing.T1()),
                           ConstraintKind::negative_semidefinite);

    AffineExpr objective = lmi::trace(p1);
    if (weights.alpha1 > 0.0) {
        const AffineExpr g1 = problem.add_scalar("gamma1");
        problem.add_constraint("[P1 Y; Y' gamma1 I] > 0", lmi::symmetric_blocks(p1, y, lmi::scaled_identity(g1, ny)),
                               ConstraintKind::positive_definite);
        objective += weights.alpha1 * g1;
    }
    if (weights.alpha2 > 0.0) {
        const AffineExpr g2 = problem.add_scalar("gamma2");
        problem.add_constraint("[P1 Z; Z' gamma2 I] > 0", lmi::symmetric_blocks(p1, z, lmi::scaled_identity(g2, ny)),
                               ConstraintKind::positive_definite);
        objective += weights.alpha2 * g2;
    }
    problem.minimize(objective);

    const lmi::SolveOutcome solved = lmi::solve(problem, options);
    DesignOutcome out;
    out.status = solved.status;
    out.residuals = solved.residuals;
    out.diagnostics = solved.solver_diagnostics;
    if (!solved.ok()) {
        return out;
    }

    DesignRaw raw;
    raw.X = solved.value("X");
    raw.Y = solved.value("Y");
    raw.Z = solved.value("Z");
    if (weights.alpha1 > 0.0) {
        raw.gamma1 = solved.value("gamma1")(0, 0);
    }
    if (weights.alpha2 > 0.0) {
        raw.gamma2 = solved.value("gamma2")(0, 0);
    }
    const Matrix p1v = symmetrize(solved.value("P1"));
    const Matrix p2v = symmetrize(solved.value("P2"));
    try {
        ObserverGains gains = recover_gains(p1v, p2v, raw.X, raw.Y, raw.Z, plant.C());
        LyapunovCertificate cert(p1v, p2v, delta, eta);
        CertificateReport report = make_report(plant, gains, cert, timing);
        const double objective_value = solved.objective_value.value_or(p1v.trace());
        out.result.emplace(DesignResult{std::move(gains), std::move(cert), std::move(raw), weights, objective_value,
                                        p1v.trace(), report, solved.residuals, solved.solver_diagnostics});
    } catch (const InvalidInput& e) {
        out.status = lmi::SolveStatus::numerical_failure;
        out.diagnostics += std::string("; ") + e.what();
        return out;
    }
    if (!out.result->report.feasible) {
        std::ostringstream os;
        os << "; analysis conditions fail at the returned point (flow eigs " << out.result->report.flow_vertex_eigs[0]
           << ", " << out.result->report.flow_vertex_eigs[1] << ", jump eig " << out.result->report.jump_eig
           << "); the strict margin is too small";
        out.status = lmi::SolveStatus::numerical_failure;
        out.diagnostics += os.str();
    }
    return out;
}

GainNormCheck gain_norm_constraints_hold(const DesignResult& result) {
    GainNormCheck check;
    check.holds = true;
    const Matrix& p1 = result.certificate.P1();
    if (result.raw.gamma1) {
        const Matrix& l = result.gains.L();
        check.margin1 = *result.raw.gamma1 - lambda_max(l.transpose() * p1 * l);
        check.holds = check.holds && *check.margin1 >= 0.0;
    }
    if (result.raw.gamma2) {
        const Matrix& f = result.gains.F();
        check.margin2 = *result.raw.gamma2 - lambda_max(f.transpose() * p1 * f);
        check.holds = check.holds && *check.margin2 >= 0.0;
    }
    return check;
}

GridReport grid_search(const PlantModel& plant, const TimingBounds& timing, const DesignWeights& weights,
                       const std::vector<double>& delta_grid, const std::vector<double>& eta_grid,
                       const lmi::SolverOptions& options, unsigned threads) {
    if (delta_grid.empty() || eta_grid.empty()) {
        throw InvalidInput("grid_search needs non-empty delta and eta grids");
    }
    for (double d : delta_grid) {
        if (!std::isfinite(d) || !(d > 0.0)) throw InvalidInput("delta grid values must be positive");
    }
    for (double e : eta_grid) {
        if (!std::isfinite(e) || !(e > 0.0)) throw InvalidInput("eta grid values must be positive");
    }
    weights.validate(plant.nz());

    const std::size_t total = delta_grid.size() * eta_grid.size();
    std::vector<DesignOutcome> outcomes(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < total; k = next++) {
            const double d = delta_grid[k / eta_grid.size()];
            const double e = eta_grid[k % eta_grid.size()];
            outcomes[k] = design_optimal(plant, timing, weights, d, e, options);
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    GridReport report;
    std::optional<std::size_t> best;
    auto key = [&](std::size_t k) {
        return std::tuple(outcomes[k].result->objective, delta_grid[k / eta_grid.size()],
                          eta_grid[k % eta_grid.size()]);
    };
    for (std::size_t k = 0; k < total; ++k) {
        GridEntry entry;
        entry.delta = delta_grid[k / eta_grid.size()];
        entry.eta = eta_grid[k % eta_grid.size()];
        entry.status = outcomes[k].status;
        entry.diagnostics = outcomes[k].diagnostics;
        const bool usable = outcomes[k].result && (outcomes[k].status == lmi::SolveStatus::optimal ||
                                                   outcomes[k].status == lmi::SolveStatus::feasible);
        if (usable) {
            entry.objective = outcomes[k].result->objective;
            if (!best || key(k) < key(*best)) {
                best = k;
            }
        }
        report.table.push_back(std::move(entry));
    }
    if (best) {
        report.best = std::move(outcomes[*best].result);
    }
    return report;
}

std::vector<double> logspace(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
        throw InvalidInput("logspace needs 0 < lo <= hi and n >= 1");
    }
    std::vector<double> out;
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n; ++i) {
        out.push_back(n == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n - 1)));
    }
    return out;
}

}  // namespace hyobs
