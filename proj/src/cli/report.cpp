#include "hyobs/cli/report.hpp"

namespace hyobs::cli {

Json report_header(const std::string& command, const ProblemConfig& config) {
    Json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["command"] = command;
    doc["config"] = to_json(config);
    return doc;
}

Json to_json(const std::vector<lmi::ConstraintResidual>& residuals) {
    Json out = Json::array();
    for (const auto& r : residuals) {
        out.push_back({{"label", r.label},
                       {"kind", lmi::to_string(r.kind)},
                       {"margin", r.margin},
                       {"extreme_eigenvalue", r.extreme_eigenvalue},
                       {"violation", r.violation},
                       {"tolerance", r.allowed},
                       {"satisfied", r.satisfied}});
    }
    return out;
}

Json to_json(const CertificateReport& r) {
    Json doc;
    doc["feasible"] = r.feasible;
    doc["mu1"] = r.mu1;
    doc["mu2"] = r.mu2;
    doc["lambda_max_M_mu1"] = r.flow_vertex_eigs[0];
    doc["lambda_max_M_mu2"] = r.flow_vertex_eigs[1];
    doc["lambda_max_jump"] = r.jump_eig;
    doc["jump_tolerance"] = r.jump_tolerance;
    doc["lambda_min_P1"] = r.p1_min_eig;
    doc["lambda_min_P2"] = r.p2_min_eig;
    doc["lambda_max_Q"] = r.jump.lambda_max_Q;
    doc["varpi_d"] = r.jump.varpi_d;
    doc["chi_d"] = r.jump.chi_d;
    doc["sector"] = {{"alpha1", r.sector.alpha1},
                     {"alpha2", r.sector.alpha2},
                     {"omega1", r.sector.omega1},
                     {"omega2", r.sector.omega2}};
    return doc;
}

Json to_json(const LyapunovCertificate& cert) {
    return {{"P1", matrix_to_json(cert.P1())},
            {"P2", matrix_to_json(cert.P2())},
            {"delta", cert.delta()},
            {"eta", cert.eta()}};
}

Json to_json(const DesignResult& r) {
    Json doc;
    doc["objective"] = r.objective;
    doc["trace_P1"] = r.trace_P1;
    doc["gains"] = {{"L", matrix_to_json(r.gains.L())},
                    {"H", matrix_to_json(r.gains.H())},
                    {"F", matrix_to_json(r.gains.F())}};
    doc["certificate"] = to_json(r.certificate);
    Json raw;
    raw["Y"] = matrix_to_json(r.raw.Y);
    raw["X"] = matrix_to_json(r.raw.X);
    raw["Z"] = matrix_to_json(r.raw.Z);
    raw["gamma1"] = r.raw.gamma1 ? Json(*r.raw.gamma1) : Json(nullptr);
    raw["gamma2"] = r.raw.gamma2 ? Json(*r.raw.gamma2) : Json(nullptr);
    doc["raw"] = std::move(raw);
    const GainNormCheck norms = gain_norm_constraints_hold(r);
    doc["gain_norm_constraints"] = {{"holds", norms.holds},
                                    {"margin1", norms.margin1 ? Json(*norms.margin1) : Json(nullptr)},
                                    {"margin2", norms.margin2 ? Json(*norms.margin2) : Json(nullptr)}};
    doc["reverification"] = to_json(r.report);
    doc["residuals"] = to_json(r.residuals);
    doc["solver_diagnostics"] = r.diagnostics;
    return doc;
}

Json to_json(const std::vector<GridEntry>& table) {
    Json out = Json::array();
    for (const auto& e : table) {
        out.push_back({{"delta", e.delta},
                       {"eta", e.eta},
                       {"status", lmi::to_string(e.status)},
                       {"objective", e.objective ? Json(*e.objective) : Json(nullptr)},
                       {"diagnostics", e.diagnostics}});
    }
    return out;
}

Json to_json(const GesEnvelope& env) {
    return {{"k", env.k}, {"lambda", env.lambda}, {"exponentially_decaying", env.exponentially_decaying}};
}

Json to_json(const CostEvaluation& cost) {
    return {{"flow_cost", cost.flow_cost},
            {"jump_cost", cost.jump_cost},
            {"total", cost.total},
            {"quadrature_error_estimate", cost.quadrature_error_estimate}};
}

Json to_json(const MonotonicityReport& m) {
    return {{"passed", m.passed()},
            {"flow_monotone", m.flow_monotone},
            {"jumps_nonincreasing", m.jumps_nonincreasing},
            {"worst_flow_violation", m.worst_flow_violation},
            {"worst_jump_violation", m.worst_jump_violation},
            {"violation_t", m.violation_t},
            {"violation_j", m.violation_j},
            {"chi_c_hat", m.chi_c_hat},
            {"chi_d_hat", m.chi_d_hat},
            {"tolerance", m.tolerance}};
}

}  // namespace hyobs::cli
