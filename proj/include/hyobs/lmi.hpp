#pragma once

#include <concepts>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyobs/linalg.hpp"

// Affine matrix inequalities over symmetric/full matrix variables, their
// canonical conic form, and the contract for semidefinite backends.
namespace hyobs::lmi {

enum class Structure { symmetric, full };

struct MatrixVariable {
    std::string name;
    int rows = 0;
    int cols = 0;
    Structure structure = Structure::full;
};

/// Lightweight handle returned by LmiProblem when a variable is declared.
class Variable {
  public:
    int id() const { return id_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::string& name() const { return name_; }

  private:
    friend class LmiProblem;
    Variable(int id, int rows, int cols, std::string name) : id_(id), rows_(rows), cols_(cols), name_(std::move(name)) {}

    int id_;
    int rows_;
    int cols_;
    std::string name_;
};

/// Constant + Σ left·V·right (or left·Vᵀ·right) over declared variables V.
///
/// Products of two expressions that both depend on variables are not affine
/// and are rejected when the product is formed.
class AffineExpr {
  public:
    struct Term {
        int var = -1;
        std::string var_name;
        Matrix left;
        Matrix right;
        bool transposed = false;
    };

    AffineExpr() = default;
    AffineExpr(const Matrix& constant);  // NOLINT(google-explicit-constructor)
    AffineExpr(const Variable& v);       // NOLINT(google-explicit-constructor)

    static AffineExpr zero(Eigen::Index rows, Eigen::Index cols);

    Eigen::Index rows() const { return constant_.rows(); }
    Eigen::Index cols() const { return constant_.cols(); }
    const Matrix& constant() const { return constant_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_constant() const { return terms_.empty(); }

    AffineExpr transpose() const;

    /// Value of the expression for the given variable values (indexed by variable id).
    Matrix evaluate(const std::vector<Matrix>& values) const;

    /// Human-readable summary used in error messages.
    std::string describe() const;

    AffineExpr& operator+=(const AffineExpr& other);
    AffineExpr& operator-=(const AffineExpr& other);
    AffineExpr& operator*=(double s);

    AffineExpr left_multiplied(const Matrix& m) const;   // m · this
    AffineExpr right_multiplied(const Matrix& m) const;  // this · m

  private:
    Matrix constant_;
    std::vector<Term> terms_;

    friend AffineExpr block_matrix(const std::vector<std::vector<AffineExpr>>& blocks);
    friend AffineExpr scaled_identity(const AffineExpr& scalar, int n);
    friend AffineExpr trace(const AffineExpr& e);
    friend AffineExpr product(const AffineExpr& a, const AffineExpr& b);
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a);

// The products are constrained templates so that Matrix·Matrix and double·Matrix
// never consider the implicit Matrix → AffineExpr conversion.
inline AffineExpr operator*(double s, const std::same_as<AffineExpr> auto& e) { return AffineExpr(e) *= s; }
inline AffineExpr operator*(const Matrix& m, const std::same_as<AffineExpr> auto& e) { return e.left_multiplied(m); }
inline AffineExpr operator*(const std::same_as<AffineExpr> auto& e, const Matrix& m) { return e.right_multiplied(m); }

/// General product; throws InvalidInput when both factors depend on variables.
AffineExpr product(const AffineExpr& a, const AffineExpr& b);

AffineExpr he(const AffineExpr& e);
AffineExpr transposed(const AffineExpr& e);
AffineExpr trace(const AffineExpr& e);
/// s·I_n for a 1x1 expression s.
AffineExpr scaled_identity(const AffineExpr& scalar, int n);
/// Dense block assembly; every row of blocks must have matching heights and widths.
AffineExpr block_matrix(const std::vector<std::vector<AffineExpr>>& blocks);
/// [[tl, tr], [trᵀ, br]]
AffineExpr symmetric_blocks(const AffineExpr& tl, const AffineExpr& tr, const AffineExpr& br);

enum class ConstraintKind {
    negative_definite,      // expr ⪯ −margin·I
    negative_semidefinite,  // expr ⪯ 0
    positive_definite,      // expr ⪰ margin·I
    positive_semidefinite,  // expr ⪰ 0
};

std::string to_string(ConstraintKind kind);

struct Constraint {
    std::string label;
    AffineExpr expr;
    ConstraintKind kind = ConstraintKind::negative_semidefinite;
    std::optional<double> margin;  // strict kinds only; defaults from the problem's margin policy
};

struct Equality {
    std::string label;
    AffineExpr expr;
    Matrix rhs;
};

/// Default margin for strict cones: rel·(1 + ‖constant part‖₂).
struct MarginPolicy {
    double relative = 1e-7;
};

class LmiProblem {
  public:
    Variable add_symmetric(const std::string& name, int n);
    Variable add_full(const std::string& name, int rows, int cols);
    Variable add_scalar(const std::string& name) { return add_full(name, 1, 1); }

    void add_constraint(std::string label, AffineExpr expr, ConstraintKind kind,
                        std::optional<double> margin = std::nullopt);
    void add_equality(std::string label, AffineExpr expr, Matrix rhs);
    /// Minimize a 1x1 affine expression. Without an objective the problem is a feasibility problem.
    void minimize(AffineExpr objective);

    const std::vector<MatrixVariable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<Equality>& equalities() const { return equalities_; }
    const std::optional<AffineExpr>& objective() const { return objective_; }

    MarginPolicy& margin_policy() { return margins_; }
    const MarginPolicy& margin_policy() const { return margins_; }

    /// Margin actually applied to a constraint (0 for non-strict kinds).
    double effective_margin(const Constraint& c) const;

    const MatrixVariable& variable(const std::string& name) const;

  private:
    void check_expression(const AffineExpr& e, const std::string& where) const;

    std::vector<MatrixVariable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<Equality> equalities_;
    std::optional<AffineExpr> objective_;
    MarginPolicy margins_;
};

// ---------------------------------------------------------------------------
// Canonical conic form
//
//   minimize  cᵀx + c0
//   s.t.      S_b(x) = G0_b + Σ_k x_k G_bk ⪰ 0   for every block b
//             E x = f
//
// Symmetric n×n variables contribute n(n+1)/2 scalars: x = V_ii on the
// diagonal and x = √2·V_ij above it, so that Σ x_k² = ⟨V, V⟩.
// ---------------------------------------------------------------------------

struct ScalarSlot {
    int var = 0;
    int row = 0;
    int col = 0;
    bool symmetric = false;
};

struct ConicBlock {
    std::string label;
    int size = 0;
    Matrix g0;
    std::vector<Matrix> g;  // one per scalar
};

struct ConicForm {
    int num_scalars = 0;
    std::vector<ScalarSlot> slots;
    std::vector<int> var_offset;
    std::vector<MatrixVariable> variables;
    Vector c;
    double c0 = 0.0;
    bool has_objective = false;
    std::vector<ConicBlock> blocks;
    Matrix eq_matrix;
    Vector eq_rhs;
};

/// Basis matrix of scalar slot k inside its variable.
Matrix slot_basis(const ConicForm& form, int k);

ConicForm canonicalize(const LmiProblem& problem);

std::map<std::string, Matrix> decanonicalize(const ConicForm& form, const Vector& x);

/// Inverse of decanonicalize on assignments (symmetric variables use their symmetric part).
Vector scalarize(const ConicForm& form, const std::map<std::string, Matrix>& assignment);

/// Plain-text dump of the conic problem, one section per block.
void write_conic_dump(std::ostream& os, const ConicForm& form);

// ---------------------------------------------------------------------------
// Backend contract
// ---------------------------------------------------------------------------

struct SolverOptions {
    double tolerance = 1e-8;
    int max_iterations = 200;
};

enum class BackendStatus { optimal, feasible, infeasible, unbounded, failure };

struct BackendResult {
    BackendStatus status = BackendStatus::failure;
    Vector x;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    int iterations = 0;
    std::string diagnostics;
};

/// A conic solver for ConicForm problems. Implementations must not share
/// mutable state between calls so that independent solves may run concurrently.
class ConicBackend {
  public:
    virtual ~ConicBackend() = default;
    virtual BackendResult solve(const ConicForm& form, const SolverOptions& options) const = 0;
    virtual std::string name() const = 0;
};

/// The default backend (primal-dual interior point, see sdp_solver.hpp).
const ConicBackend& default_backend();

enum class SolveStatus { optimal, feasible, infeasible, numerical_failure };

std::string to_string(SolveStatus s);

struct ConstraintResidual {
    std::string label;
    ConstraintKind kind = ConstraintKind::negative_semidefinite;
    double margin = 0.0;
    double extreme_eigenvalue = 0.0;  // λmax for negative kinds, λmin for positive kinds
    double violation = 0.0;           // > 0 means the declared side is violated
    double allowed = 0.0;
    bool satisfied = false;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::numerical_failure;
    std::map<std::string, Matrix> assignments;
    std::optional<double> objective_value;
    std::string solver_diagnostics;
    std::vector<ConstraintResidual> residuals;
    double worst_residual = 0.0;
    int iterations = 0;

    bool ok() const { return status == SolveStatus::optimal || status == SolveStatus::feasible; }
    const Matrix& value(const std::string& name) const;
};

/// Re-assembles every constraint of the problem at the assignment and checks
/// the declared cone membership within allowed = 10·tol·(1 + ‖value‖₂).
std::vector<ConstraintResidual> validate(const LmiProblem& problem, const std::map<std::string, Matrix>& assignment,
                                         double tolerance);

SolveOutcome solve(const LmiProblem& problem, const SolverOptions& options = {},
                   const ConicBackend& backend = default_backend());

}  // namespace hyobs::lmi
