#pragma once

#include <string>
#include <vector>

#include "hyobs/cli/config.hpp"
#include "hyobs/lmi.hpp"
#include "hyobs/lyapunov.hpp"
#include "hyobs/simulator.hpp"
#include "hyobs/synthesis.hpp"

namespace hyobs::cli {

inline constexpr const char* kToolName = "hyobs";
inline constexpr const char* kToolVersion = "0.1.0";

/// Report skeleton: command, tool version and the echoed configuration.
Json report_header(const std::string& command, const ProblemConfig& config);

Json to_json(const std::vector<lmi::ConstraintResidual>& residuals);
Json to_json(const CertificateReport& report);
Json to_json(const LyapunovCertificate& cert);
Json to_json(const DesignResult& result);
Json to_json(const std::vector<GridEntry>& table);
Json to_json(const GesEnvelope& envelope);
Json to_json(const CostEvaluation& cost);
Json to_json(const MonotonicityReport& mono);

}  // namespace hyobs::cli
