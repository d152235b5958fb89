#pragma once

#include "hyobs/lmi.hpp"

namespace hyobs::lmi {

/// Dense primal-dual interior-point method for ConicForm problems.
///
/// Linear equalities are eliminated through a nullspace basis. A phase I
/// problem (minimize t s.t. S(x) + tI ⪰ 0) decides feasibility; problems
/// with an objective are then solved from an infeasible start using the
/// HKM search direction with Mehrotra predictor-corrector steps.
///
/// The solver keeps no state between calls and is safe to use concurrently.
class InteriorPointBackend : public ConicBackend {
  public:
    BackendResult solve(const ConicForm& form, const SolverOptions& options) const override;
    std::string name() const override { return "ipm-hkm"; }
};

}  // namespace hyobs::lmi
