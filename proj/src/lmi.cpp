#include "hyobs/lmi.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace hyobs::lmi {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::string shape(Eigen::Index r, Eigen::Index c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

void require_same_shape(const AffineExpr& a, const AffineExpr& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string("affine ") + op + ": shape mismatch " + shape(a.rows(), a.cols()) + " vs " +
                             shape(b.rows(), b.cols()));
    }
}

// Variable value seen by a term: V or Vᵀ.
Matrix term_core(const AffineExpr::Term& t, const Matrix& value) { return t.transposed ? Matrix(value.transpose()) : value; }

}  // namespace

// ---------------------------------------------------------------------------
// AffineExpr
// ---------------------------------------------------------------------------

AffineExpr::AffineExpr(const Matrix& constant) : constant_(constant) {}

AffineExpr::AffineExpr(const Variable& v) : constant_(Matrix::Zero(v.rows(), v.cols())) {
    Term t;
    t.var = v.id();
    t.var_name = v.name();
    t.left = Matrix::Identity(v.rows(), v.rows());
    t.right = Matrix::Identity(v.cols(), v.cols());
    terms_.push_back(std::move(t));
}

AffineExpr AffineExpr::zero(Eigen::Index rows, Eigen::Index cols) { return AffineExpr(Matrix::Zero(rows, cols)); }

AffineExpr AffineExpr::transpose() const {
    AffineExpr out(Matrix(constant_.transpose()));
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        Term u;
        u.var = t.var;
        u.var_name = t.var_name;
        u.left = t.right.transpose();
        u.right = t.left.transpose();
        u.transposed = !t.transposed;
        out.terms_.push_back(std::move(u));
    }
    return out;
}

Matrix AffineExpr::evaluate(const std::vector<Matrix>& values) const {
    Matrix out = constant_;
    for (const auto& t : terms_) {
        if (t.var < 0 || t.var >= static_cast<int>(values.size())) {
            throw InvalidInput("expression references undeclared variable '" + t.var_name + "'");
        }
        out += t.left * term_core(t, values[t.var]) * t.right;
    }
    return out;
}

std::string AffineExpr::describe() const {
    std::ostringstream os;
    os << shape(rows(), cols()) << " expression";
    if (terms_.empty()) {
        os << " (constant)";
        return os.str();
    }
    std::set<std::string> names;
    for (const auto& t : terms_) {
        names.insert(t.var_name);
    }
    os << " in {";
    bool first = true;
    for (const auto& n : names) {
        os << (first ? "" : ", ") << n;
        first = false;
    }
    os << "}";
    return os.str();
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
    require_same_shape(*this, other, "+");
    constant_ += other.constant_;
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
    require_same_shape(*this, other, "-");
    constant_ -= other.constant_;
    for (auto t : other.terms_) {
        t.left = -t.left;
        terms_.push_back(std::move(t));
    }
    return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
    constant_ *= s;
    for (auto& t : terms_) {
        t.left *= s;
    }
    return *this;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

AffineExpr AffineExpr::left_multiplied(const Matrix& m) const {
    if (m.cols() != rows()) {
        throw DimensionError("affine *: cannot multiply " + shape(m.rows(), m.cols()) + " by " + describe());
    }
    AffineExpr out(Matrix(m * constant_));
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        auto u = t;
        u.left = m * t.left;
        out.terms_.push_back(std::move(u));
    }
    return out;
}

AffineExpr AffineExpr::right_multiplied(const Matrix& m) const {
    if (cols() != m.rows()) {
        throw DimensionError("affine *: cannot multiply " + describe() + " by " + shape(m.rows(), m.cols()));
    }
    AffineExpr out(Matrix(constant_ * m));
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        auto u = t;
        u.right = t.right * m;
        out.terms_.push_back(std::move(u));
    }
    return out;
}

AffineExpr product(const AffineExpr& a, const AffineExpr& b) {
    if (!a.is_constant() && !b.is_constant()) {
        throw InvalidInput("non-affine term: product of " + a.describe() + " and " + b.describe());
    }
    if (a.is_constant()) {
        return b.left_multiplied(a.constant_);
    }
    return a.right_multiplied(b.constant_);
}

AffineExpr he(const AffineExpr& e) {
    if (e.rows() != e.cols()) {
        throw DimensionError("He() needs a square expression, got " + e.describe());
    }
    return e + e.transpose();
}

AffineExpr transposed(const AffineExpr& e) { return e.transpose(); }

AffineExpr trace(const AffineExpr& e) {
    if (e.rows() != e.cols()) {
        throw DimensionError("trace() needs a square expression, got " + e.describe());
    }
    // tr(L V R) = Σ_i e_iᵀ L V R e_i
    AffineExpr out(Matrix::Constant(1, 1, e.constant_.trace()));
    for (const auto& t : e.terms_) {
        for (Eigen::Index i = 0; i < e.rows(); ++i) {
            AffineExpr::Term u = t;
            u.left = t.left.row(i);
            u.right = t.right.col(i);
            out.terms_.push_back(std::move(u));
        }
    }
    return out;
}

AffineExpr scaled_identity(const AffineExpr& scalar, int n) {
    if (scalar.rows() != 1 || scalar.cols() != 1) {
        throw DimensionError("scaled_identity needs a 1x1 expression, got " + scalar.describe());
    }
    AffineExpr out(Matrix(scalar.constant_(0, 0) * Matrix::Identity(n, n)));
    for (const auto& t : scalar.terms_) {
        for (int i = 0; i < n; ++i) {
            AffineExpr::Term u = t;
            u.left = Matrix::Zero(n, t.left.cols());
            u.left.row(i) = t.left.row(0);
            u.right = Matrix::Zero(t.right.rows(), n);
            u.right.col(i) = t.right.col(0);
            out.terms_.push_back(std::move(u));
        }
    }
    return out;
}

AffineExpr block_matrix(const std::vector<std::vector<AffineExpr>>& blocks) {
    if (blocks.empty() || blocks.front().empty()) {
        throw DimensionError("block_matrix: empty block layout");
    }
    const auto ncols = blocks.front().size();
    std::vector<Eigen::Index> heights;
    std::vector<Eigen::Index> widths;
    for (const auto& b : blocks.front()) {
        widths.push_back(b.cols());
    }
    for (const auto& row : blocks) {
        if (row.size() != ncols) {
            throw DimensionError("block_matrix: ragged block layout");
        }
        heights.push_back(row.front().rows());
        for (std::size_t j = 0; j < ncols; ++j) {
            if (row[j].rows() != heights.back() || row[j].cols() != widths[j]) {
                throw DimensionError("block_matrix: block " + row[j].describe() + " does not fit its row/column");
            }
        }
    }
    Eigen::Index total_rows = 0;
    Eigen::Index total_cols = 0;
    for (auto h : heights) total_rows += h;
    for (auto w : widths) total_cols += w;

    AffineExpr out(Matrix::Zero(total_rows, total_cols));
    Eigen::Index r0 = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        Eigen::Index c0 = 0;
        for (std::size_t j = 0; j < ncols; ++j) {
            const auto& b = blocks[i][j];
            out.constant_.block(r0, c0, b.rows(), b.cols()) = b.constant_;
            for (const auto& t : b.terms_) {
                AffineExpr::Term u = t;
                u.left = Matrix::Zero(total_rows, t.left.cols());
                u.left.middleRows(r0, b.rows()) = t.left;
                u.right = Matrix::Zero(t.right.rows(), total_cols);
                u.right.middleCols(c0, b.cols()) = t.right;
                out.terms_.push_back(std::move(u));
            }
            c0 += widths[j];
        }
        r0 += heights[i];
    }
    return out;
}

AffineExpr symmetric_blocks(const AffineExpr& tl, const AffineExpr& tr, const AffineExpr& br) {
    return block_matrix({{tl, tr}, {tr.transpose(), br}});
}

std::string to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::negative_definite: return "negative-definite";
        case ConstraintKind::negative_semidefinite: return "negative-semidefinite";
        case ConstraintKind::positive_definite: return "positive-definite";
        case ConstraintKind::positive_semidefinite: return "positive-semidefinite";
    }
    return "unknown";
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// LmiProblem
// ---------------------------------------------------------------------------

Variable LmiProblem::add_symmetric(const std::string& name, int n) {
    if (n < 1) {
        throw DimensionError("variable '" + name + "' must have positive size");
    }
    for (const auto& v : variables_) {
        if (v.name == name) {
            throw InvalidInput("duplicate variable name '" + name + "'");
        }
    }
    variables_.push_back({name, n, n, Structure::symmetric});
    return Variable(static_cast<int>(variables_.size()) - 1, n, n, name);
}

Variable LmiProblem::add_full(const std::string& name, int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw DimensionError("variable '" + name + "' must have positive size");
    }
    for (const auto& v : variables_) {
        if (v.name == name) {
            throw InvalidInput("duplicate variable name '" + name + "'");
        }
    }
    variables_.push_back({name, rows, cols, Structure::full});
    return Variable(static_cast<int>(variables_.size()) - 1, rows, cols, name);
}

void LmiProblem::check_expression(const AffineExpr& e, const std::string& where) const {
    for (const auto& t : e.terms()) {
        if (t.var < 0 || t.var >= static_cast<int>(variables_.size()) || variables_[t.var].name != t.var_name) {
            throw InvalidInput(where + ": references undeclared variable '" + t.var_name + "'");
        }
    }
}

void LmiProblem::add_constraint(std::string label, AffineExpr expr, ConstraintKind kind, std::optional<double> margin) {
    check_expression(expr, "constraint '" + label + "'");
    if (expr.rows() != expr.cols() || expr.rows() == 0) {
        throw DimensionError("constraint '" + label + "' must be square, got " + expr.describe());
    }
    if (margin && !(*margin >= 0.0)) {
        throw InvalidInput("constraint '" + label + "' has a negative margin");
    }
    constraints_.push_back({std::move(label), std::move(expr), kind, margin});
}

void LmiProblem::add_equality(std::string label, AffineExpr expr, Matrix rhs) {
    check_expression(expr, "equality '" + label + "'");
    if (expr.rows() != rhs.rows() || expr.cols() != rhs.cols()) {
        throw DimensionError("equality '" + label + "': right-hand side shape does not match " + expr.describe());
    }
    equalities_.push_back({std::move(label), std::move(expr), std::move(rhs)});
}

void LmiProblem::minimize(AffineExpr objective) {
    check_expression(objective, "objective");
    if (objective.rows() != 1 || objective.cols() != 1) {
        throw DimensionError("objective must be 1x1, got " + objective.describe());
    }
    objective_ = std::move(objective);
}

double LmiProblem::effective_margin(const Constraint& c) const {
    if (c.kind != ConstraintKind::negative_definite && c.kind != ConstraintKind::positive_definite) {
        return 0.0;
    }
    if (c.margin) {
        return *c.margin;
    }
    return margins_.relative * (1.0 + spectral_norm(c.expr.constant()));
}

const MatrixVariable& LmiProblem::variable(const std::string& name) const {
    for (const auto& v : variables_) {
        if (v.name == name) {
            return v;
        }
    }
    throw InvalidInput("unknown variable '" + name + "'");
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

Matrix slot_basis(const ConicForm& form, int k) {
    const auto& s = form.slots.at(k);
    const auto& v = form.variables.at(s.var);
    Matrix e = Matrix::Zero(v.rows, v.cols);
    if (s.symmetric && s.row != s.col) {
        e(s.row, s.col) = 1.0 / kSqrt2;
        e(s.col, s.row) = 1.0 / kSqrt2;
    } else {
        e(s.row, s.col) = 1.0;
    }
    return e;
}

namespace {

// Coefficient of scalar k in expression e: Σ over terms on that variable of L·E_k·R.
Matrix coefficient(const AffineExpr& e, int var, const Matrix& basis) {
    Matrix out = Matrix::Zero(e.rows(), e.cols());
    for (const auto& t : e.terms()) {
        if (t.var == var) {
            out += t.left * (t.transposed ? Matrix(basis.transpose()) : basis) * t.right;
        }
    }
    return out;
}

double symmetry_scale(const Matrix& m) { return 1.0 + m.cwiseAbs().maxCoeff(); }

}  // namespace

ConicForm canonicalize(const LmiProblem& problem) {
    ConicForm form;
    form.variables = problem.variables();
    int offset = 0;
    for (int vi = 0; vi < static_cast<int>(form.variables.size()); ++vi) {
        const auto& v = form.variables[vi];
        form.var_offset.push_back(offset);
        if (v.structure == Structure::symmetric) {
            for (int j = 0; j < v.cols; ++j) {
                for (int i = 0; i <= j; ++i) {
                    form.slots.push_back({vi, i, j, true});
                }
            }
        } else {
            for (int j = 0; j < v.cols; ++j) {
                for (int i = 0; i < v.rows; ++i) {
                    form.slots.push_back({vi, i, j, false});
                }
            }
        }
        offset = static_cast<int>(form.slots.size());
    }
    form.num_scalars = offset;
    const int m = form.num_scalars;

    std::vector<Matrix> bases(m);
    for (int k = 0; k < m; ++k) {
        bases[k] = slot_basis(form, k);
    }

    for (const auto& c : problem.constraints()) {
        ConicBlock block;
        block.label = c.label;
        block.size = static_cast<int>(c.expr.rows());
        const double margin = problem.effective_margin(c);
        const bool negative =
            c.kind == ConstraintKind::negative_definite || c.kind == ConstraintKind::negative_semidefinite;
        const double sign = negative ? -1.0 : 1.0;

        const Matrix& k0 = c.expr.constant();
        const double scale = symmetry_scale(k0);
        if (!is_symmetric(k0, 1e-12 * scale)) {
            throw InvalidInput("constraint '" + c.label + "' is not symmetric (constant part)");
        }
        block.g0 = sign * symmetrize(k0) - margin * Matrix::Identity(block.size, block.size);
        block.g.resize(m);
        for (int k = 0; k < m; ++k) {
            Matrix gk = coefficient(c.expr, form.slots[k].var, bases[k]);
            if (gk.size() > 0 && !is_symmetric(gk, 1e-12 * symmetry_scale(gk))) {
                throw InvalidInput("constraint '" + c.label + "' is not symmetric in variable '" +
                                   form.variables[form.slots[k].var].name + "'");
            }
            block.g[k] = sign * symmetrize(gk);
        }
        form.blocks.push_back(std::move(block));
    }

    // Equalities: one scalar row per entry.
    std::vector<Vector> rows;
    std::vector<double> rhs;
    for (const auto& eq : problem.equalities()) {
        std::vector<Matrix> coeffs(m);
        for (int k = 0; k < m; ++k) {
            coeffs[k] = coefficient(eq.expr, form.slots[k].var, bases[k]);
        }
        for (Eigen::Index j = 0; j < eq.expr.cols(); ++j) {
            for (Eigen::Index i = 0; i < eq.expr.rows(); ++i) {
                Vector row(m);
                for (int k = 0; k < m; ++k) {
                    row(k) = coeffs[k](i, j);
                }
                rows.push_back(row);
                rhs.push_back(eq.rhs(i, j) - eq.expr.constant()(i, j));
            }
        }
    }
    form.eq_matrix.resize(static_cast<Eigen::Index>(rows.size()), m);
    form.eq_rhs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        form.eq_matrix.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
        form.eq_rhs(static_cast<Eigen::Index>(r)) = rhs[r];
    }

    form.c = Vector::Zero(m);
    if (problem.objective()) {
        form.has_objective = true;
        const auto& obj = *problem.objective();
        form.c0 = obj.constant()(0, 0);
        for (int k = 0; k < m; ++k) {
            form.c(k) = coefficient(obj, form.slots[k].var, bases[k])(0, 0);
        }
    }
    return form;
}

std::map<std::string, Matrix> decanonicalize(const ConicForm& form, const Vector& x) {
    if (x.size() != form.num_scalars) {
        throw DimensionError("decanonicalize: expected " + std::to_string(form.num_scalars) + " scalars");
    }
    std::map<std::string, Matrix> out;
    for (const auto& v : form.variables) {
        out[v.name] = Matrix::Zero(v.rows, v.cols);
    }
    for (int k = 0; k < form.num_scalars; ++k) {
        const auto& s = form.slots[k];
        auto& m = out[form.variables[s.var].name];
        if (s.symmetric && s.row != s.col) {
            m(s.row, s.col) = x(k) / kSqrt2;
            m(s.col, s.row) = x(k) / kSqrt2;
        } else {
            m(s.row, s.col) = x(k);
        }
    }
    return out;
}

Vector scalarize(const ConicForm& form, const std::map<std::string, Matrix>& assignment) {
    Vector x(form.num_scalars);
    for (int k = 0; k < form.num_scalars; ++k) {
        const auto& s = form.slots[k];
        const auto& v = form.variables[s.var];
        auto it = assignment.find(v.name);
        if (it == assignment.end()) {
            throw InvalidInput("scalarize: no value for variable '" + v.name + "'");
        }
        require_shape(it->second, v.rows, v.cols, v.name);
        if (s.symmetric && s.row != s.col) {
            x(k) = kSqrt2 * 0.5 * (it->second(s.row, s.col) + it->second(s.col, s.row));
        } else {
            x(k) = it->second(s.row, s.col);
        }
    }
    return x;
}

void write_conic_dump(std::ostream& os, const ConicForm& form) {
    const auto old_precision = os.precision(17);
    os << "# conic problem: minimize c'x + c0 s.t. G0 + sum_k x_k G_k >= 0 (per block), E x = f\n";
    os << "scalars " << form.num_scalars << "\n";
    for (int k = 0; k < form.num_scalars; ++k) {
        const auto& s = form.slots[k];
        os << "x" << k << " " << form.variables[s.var].name << "(" << s.row << "," << s.col << ")"
           << (s.symmetric && s.row != s.col ? " sqrt2-scaled" : "") << "\n";
    }
    os << "objective " << (form.has_objective ? "min" : "none") << "\n";
    os << "c0 " << form.c0 << "\n";
    os << "c";
    for (int k = 0; k < form.num_scalars; ++k) {
        os << " " << form.c(k);
    }
    os << "\n";
    for (const auto& b : form.blocks) {
        os << "\n[block " << b.label << " size " << b.size << "]\n";
        os << "G0\n" << b.g0 << "\n";
        for (int k = 0; k < form.num_scalars; ++k) {
            if (b.g[k].cwiseAbs().maxCoeff() == 0.0) {
                continue;
            }
            os << "G" << k << "\n" << b.g[k] << "\n";
        }
    }
    if (form.eq_matrix.rows() > 0) {
        os << "\n[equalities " << form.eq_matrix.rows() << "]\n";
        os << "E\n" << form.eq_matrix << "\nf\n" << form.eq_rhs.transpose() << "\n";
    }
    os.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Solve
// ---------------------------------------------------------------------------

const Matrix& SolveOutcome::value(const std::string& name) const {
    auto it = assignments.find(name);
    if (it == assignments.end()) {
        throw InvalidInput("no value for variable '" + name + "'");
    }
    return it->second;
}

std::vector<ConstraintResidual> validate(const LmiProblem& problem, const std::map<std::string, Matrix>& assignment,
                                         double tolerance) {
    std::vector<Matrix> values;
    for (const auto& v : problem.variables()) {
        auto it = assignment.find(v.name);
        if (it == assignment.end()) {
            throw InvalidInput("validate: no value for variable '" + v.name + "'");
        }
        values.push_back(it->second);
    }
    std::vector<ConstraintResidual> out;
    for (const auto& c : problem.constraints()) {
        const Matrix value = symmetrize(c.expr.evaluate(values));
        ConstraintResidual r;
        r.label = c.label;
        r.kind = c.kind;
        r.margin = problem.effective_margin(c);
        switch (c.kind) {
            case ConstraintKind::negative_definite:
            case ConstraintKind::negative_semidefinite:
                r.extreme_eigenvalue = lambda_max(value);
                r.violation = r.extreme_eigenvalue + r.margin;
                break;
            case ConstraintKind::positive_definite:
            case ConstraintKind::positive_semidefinite:
                r.extreme_eigenvalue = lambda_min(value);
                r.violation = r.margin - r.extreme_eigenvalue;
                break;
        }
        r.allowed = 10.0 * tolerance * (1.0 + spectral_norm(value));
        r.satisfied = r.violation <= r.allowed;
        out.push_back(r);
    }
    for (const auto& eq : problem.equalities()) {
        const Matrix value = eq.expr.evaluate(values);
        ConstraintResidual r;
        r.label = eq.label;
        r.kind = ConstraintKind::positive_semidefinite;
        r.violation = (value - eq.rhs).cwiseAbs().maxCoeff();
        r.extreme_eigenvalue = r.violation;
        r.allowed = 10.0 * tolerance * (1.0 + eq.rhs.cwiseAbs().maxCoeff());
        r.satisfied = r.violation <= r.allowed;
        out.push_back(r);
    }
    return out;
}

SolveOutcome solve(const LmiProblem& problem, const SolverOptions& options, const ConicBackend& backend) {
    SolveOutcome outcome;
    const ConicForm form = canonicalize(problem);

    BackendResult result;
    try {
        result = backend.solve(form, options);
    } catch (const std::exception& e) {
        outcome.status = SolveStatus::numerical_failure;
        outcome.solver_diagnostics = backend.name() + ": " + e.what();
        return outcome;
    }
    outcome.iterations = result.iterations;
    outcome.solver_diagnostics = backend.name() + ": " + result.diagnostics;

    switch (result.status) {
        case BackendStatus::infeasible:
            outcome.status = SolveStatus::infeasible;
            return outcome;
        case BackendStatus::unbounded:
        case BackendStatus::failure:
            outcome.status = SolveStatus::numerical_failure;
            return outcome;
        case BackendStatus::optimal:
        case BackendStatus::feasible:
            break;
    }
    if (result.x.size() != form.num_scalars || !result.x.allFinite()) {
        outcome.status = SolveStatus::numerical_failure;
        outcome.solver_diagnostics += "; backend returned a malformed point";
        return outcome;
    }

    outcome.assignments = decanonicalize(form, result.x);
    if (form.has_objective) {
        outcome.objective_value = form.c.dot(result.x) + form.c0;
    }
    outcome.residuals = validate(problem, outcome.assignments, options.tolerance);
    outcome.worst_residual = -std::numeric_limits<double>::infinity();
    bool all_ok = true;
    for (const auto& r : outcome.residuals) {
        outcome.worst_residual = std::max(outcome.worst_residual, r.violation);
        all_ok = all_ok && r.satisfied;
    }
    if (outcome.residuals.empty()) {
        outcome.worst_residual = 0.0;
    }
    if (!all_ok) {
        outcome.status = SolveStatus::numerical_failure;
        for (const auto& r : outcome.residuals) {
            if (!r.satisfied) {
                std::ostringstream os;
                os << "; post-validation failed for '" << r.label << "' (violation " << r.violation << " > "
                   << r.allowed << ")";
                outcome.solver_diagnostics += os.str();
            }
        }
        return outcome;
    }
    if (result.status == BackendStatus::optimal && form.has_objective) {
        outcome.status = SolveStatus::optimal;
    } else {
        outcome.status = SolveStatus::feasible;
    }
    return outcome;
}

}  // namespace hyobs::lmi
