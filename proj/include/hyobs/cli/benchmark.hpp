#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyobs/cli/config.hpp"

namespace hyobs::cli {

/// Second-order benchmark: A = [[0.2, −1.01], [1, 0]], C = [0.5, −1],
/// T1 = 0.5, T2 = 1.1, δ = 0.03, η = 1e−4, Q_F = I, Q_J = 0.01·I, sinusoidal
/// sampling from z = (10, 0), ẑ = 0, θ = 5, τ = 0 over 30 s.
ProblemConfig benchmark_config();

struct BenchmarkCase {
    std::string name;  // "I" .. "V"
    bool designed = false;  // I–III come from the guaranteed-cost design, IV–V have L = H = 0
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    ObserverGains reference;
    std::optional<double> reference_trace_P1;
};

std::vector<BenchmarkCase> benchmark_cases();
const BenchmarkCase& benchmark_case(const std::string& name);

/// |Δε_i| = |ε_i⁺ − ε_i| at each jump; the arcs must share their jump times.
struct JumpSizeComparison {
    int matched = 0;
    int strictly_smaller = 0;
    std::optional<double> first_violation_t;
    std::vector<double> times;
    std::vector<double> lhs;
    std::vector<double> rhs;

    bool all_strictly_smaller() const { return matched > 0 && strictly_smaller == matched; }
};

JumpSizeComparison compare_jump_sizes(const HybridArc& lhs, const HybridArc& rhs, int component);

}  // namespace hyobs::cli
