#include "hyobs/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace hyobs::lmi {

namespace {

using Blocks = std::vector<Matrix>;

// min cᵀz  s.t.  S(z) = Σ_j z_j A_j − C ⪰ 0 (block diagonal)
// max ⟨C, Y⟩ s.t. ⟨A_j, Y⟩ = c_j, Y ⪰ 0
struct Sdp {
    std::vector<int> sizes;
    Blocks cmat;
    std::vector<std::vector<std::pair<int, Matrix>>> a;  // per variable: nonzero (block, A_jb)
    Vector c;

    int m() const { return static_cast<int>(a.size()); }
    int blocks() const { return static_cast<int>(sizes.size()); }
};

double inner(const Blocks& x, const Blocks& y) {
    double s = 0.0;
    for (std::size_t b = 0; b < x.size(); ++b) {
        s += x[b].cwiseProduct(y[b]).sum();
    }
    return s;
}

double frob(const Blocks& x) { return std::sqrt(inner(x, x)); }

Blocks slack(const Sdp& sdp, const Vector& z) {
    Blocks s(sdp.blocks());
    for (int b = 0; b < sdp.blocks(); ++b) {
        s[b] = -sdp.cmat[b];
    }
    for (int j = 0; j < sdp.m(); ++j) {
        for (const auto& [b, ajb] : sdp.a[j]) {
            s[b] += z(j) * ajb;
        }
    }
    return s;
}

// Largest α with X + α dX ⪰ 0 (infinity when the direction never leaves the cone).
double max_step(const Blocks& x, const Blocks& dx) {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < x.size(); ++b) {
        Eigen::LLT<Matrix> llt(x[b]);
        if (llt.info() != Eigen::Success) {
            return 0.0;
        }
        Matrix linv_dx = llt.matrixL().solve(dx[b]);
        Matrix m = llt.matrixL().solve(Matrix(linv_dx.transpose()));
        const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(m), Eigen::EigenvaluesOnly).eigenvalues()(0);
        if (lmin < 0.0) {
            alpha = std::min(alpha, -1.0 / lmin);
        }
    }
    return alpha;
}

double min_eigenvalue(const Blocks& x) {
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& xb : x) {
        lmin = std::min(lmin, lambda_min(xb));
    }
    return lmin;
}

enum class IpmExit { converged, max_iterations, stalled, diverged };

struct IpmState {
    IpmExit exit = IpmExit::max_iterations;
    Vector z;
    Blocks s;
    Blocks y;
    double pobj = 0.0;
    double dobj = 0.0;
    double relp = 0.0;
    double reld = 0.0;
    double relgap = 0.0;
    int iterations = 0;
};

IpmState run_ipm(const Sdp& sdp, const SolverOptions& options) {
    const int m = sdp.m();
    const int nb = sdp.blocks();
    int n_total = 0;
    for (int sz : sdp.sizes) {
        n_total += sz;
    }

    std::vector<std::vector<std::pair<int, const Matrix*>>> block_vars(nb);
    for (int j = 0; j < m; ++j) {
        for (const auto& [b, ajb] : sdp.a[j]) {
            block_vars[b].push_back({j, &ajb});
        }
    }

    const double norm_c_mat = frob(sdp.cmat);
    const double norm_c = sdp.c.norm();

    IpmState st;
    st.z = Vector::Zero(m);
    st.s.resize(nb);
    st.y.resize(nb);
    for (int b = 0; b < nb; ++b) {
        const double nsz = sdp.sizes[b];
        double xi = std::max(10.0, std::sqrt(nsz));
        double zeta = std::max({10.0, std::sqrt(nsz), sdp.cmat[b].norm()});
        for (const auto& [j, ajb] : block_vars[b]) {
            const double an = ajb->norm();
            xi = std::max(xi, nsz * (1.0 + std::abs(sdp.c(j))) / (1.0 + an));
            zeta = std::max(zeta, an);
        }
        st.y[b] = xi * Matrix::Identity(sdp.sizes[b], sdp.sizes[b]);
        st.s[b] = zeta * Matrix::Identity(sdp.sizes[b], sdp.sizes[b]);
    }

    Blocks sinv(nb);
    Blocks rp(nb);
    Vector rd(m);

    for (int iter = 0; iter <= options.max_iterations; ++iter) {
        st.iterations = iter;
        Blocks s_of_z = slack(sdp, st.z);
        for (int b = 0; b < nb; ++b) {
            rp[b] = s_of_z[b] - st.s[b];
        }
        for (int j = 0; j < m; ++j) {
            double v = 0.0;
            for (const auto& [b, ajb] : sdp.a[j]) {
                v += ajb.cwiseProduct(st.y[b]).sum();
            }
            rd(j) = sdp.c(j) - v;
        }
        const double sy = inner(st.s, st.y);
        const double mu = sy / n_total;
        st.pobj = sdp.c.dot(st.z);
        st.dobj = inner(sdp.cmat, st.y);
        st.relp = frob(rp) / (1.0 + norm_c_mat);
        st.reld = rd.norm() / (1.0 + norm_c);
        const double denom = 1.0 + std::abs(st.pobj) + std::abs(st.dobj);
        st.relgap = std::max(std::abs(sy), std::abs(st.pobj - st.dobj)) / denom;

        if (st.relp <= options.tolerance && st.reld <= options.tolerance && st.relgap <= options.tolerance) {
            st.exit = IpmExit::converged;
            return st;
        }
        if (iter == options.max_iterations) {
            st.exit = IpmExit::max_iterations;
            return st;
        }
        const double big = 1e13 * (1.0 + norm_c_mat + norm_c);
        if (!st.z.allFinite() || st.z.norm() > big || frob(st.y) > big || frob(st.s) > big) {
            st.exit = IpmExit::diverged;
            return st;
        }

        for (int b = 0; b < nb; ++b) {
            Eigen::LLT<Matrix> llt(st.s[b]);
            if (llt.info() != Eigen::Success) {
                st.exit = IpmExit::stalled;
                return st;
            }
            sinv[b] = llt.solve(Matrix::Identity(sdp.sizes[b], sdp.sizes[b]));
        }

        // Schur complement B_ij = tr(A_i S⁻¹ A_j Y).
        Matrix schur = Matrix::Zero(m, m);
        for (int b = 0; b < nb; ++b) {
            const auto& vars = block_vars[b];
            for (std::size_t q = 0; q < vars.size(); ++q) {
                const Matrix w = sinv[b] * (*vars[q].second) * st.y[b];
                for (std::size_t p = 0; p <= q; ++p) {
                    const double v = vars[p].second->cwiseProduct(w).sum();
                    schur(vars[p].first, vars[q].first) += v;
                    if (p != q) {
                        schur(vars[q].first, vars[p].first) += v;
                    }
                }
            }
        }
        schur = symmetrize(schur);
        Eigen::LDLT<Matrix> ldlt(schur);
        double reg = 0.0;
        const double diag_scale = std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
        while (ldlt.info() != Eigen::Success || !ldlt.isPositive() || (ldlt.vectorD().array() <= 0.0).any()) {
            reg = reg == 0.0 ? 1e-14 * diag_scale : reg * 100.0;
            if (reg > 1e-4 * diag_scale) {
                st.exit = IpmExit::stalled;
                return st;
            }
            ldlt.compute(schur + reg * Matrix::Identity(m, m));
        }

        auto direction = [&](const Blocks& rc, Vector& dz, Blocks& ds, Blocks& dy) {
            Blocks g(nb);
            for (int b = 0; b < nb; ++b) {
                g[b] = sinv[b] * (rc[b] - rp[b] * st.y[b]);
            }
            Vector rhs(m);
            for (int j = 0; j < m; ++j) {
                double v = 0.0;
                for (const auto& [b, ajb] : sdp.a[j]) {
                    v += ajb.cwiseProduct(g[b]).sum();
                }
                rhs(j) = v - rd(j);
            }
            dz = ldlt.solve(rhs);
            ds = rp;
            for (int j = 0; j < m; ++j) {
                for (const auto& [b, ajb] : sdp.a[j]) {
                    ds[b] += dz(j) * ajb;
                }
            }
            dy.resize(nb);
            for (int b = 0; b < nb; ++b) {
                dy[b] = symmetrize(sinv[b] * (rc[b] - ds[b] * st.y[b]));
            }
        };

        // Predictor.
        Blocks rc(nb);
        for (int b = 0; b < nb; ++b) {
            rc[b] = -st.s[b] * st.y[b];
        }
        Vector dz_a;
        Blocks ds_a;
        Blocks dy_a;
        direction(rc, dz_a, ds_a, dy_a);
        const double ap_a = std::min(1.0, max_step(st.s, ds_a));
        const double ad_a = std::min(1.0, max_step(st.y, dy_a));
        Blocks s_a = st.s;
        Blocks y_a = st.y;
        for (int b = 0; b < nb; ++b) {
            s_a[b] += ap_a * ds_a[b];
            y_a[b] += ad_a * dy_a[b];
        }
        const double mu_aff = inner(s_a, y_a) / n_total;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        // Corrector.
        for (int b = 0; b < nb; ++b) {
            rc[b] = sigma * mu * Matrix::Identity(sdp.sizes[b], sdp.sizes[b]) - st.s[b] * st.y[b] - ds_a[b] * dy_a[b];
        }
        Vector dz;
        Blocks ds;
        Blocks dy;
        direction(rc, dz, ds, dy);
        const double gamma = 0.9 + 0.09 * std::min(ap_a, ad_a);
        const double ap = std::min(1.0, gamma * max_step(st.s, ds));
        const double ad = std::min(1.0, gamma * max_step(st.y, dy));
        if (ap < 1e-10 && ad < 1e-10) {
            st.exit = IpmExit::stalled;
            return st;
        }
        st.z += ap * dz;
        for (int b = 0; b < nb; ++b) {
            st.s[b] = symmetrize(st.s[b] + ap * ds[b]);
            st.y[b] = symmetrize(st.y[b] + ad * dy[b]);
        }
    }
    return st;
}

// Reduced problem in z after eliminating E x = f through x = x_p + N z.
struct Reduced {
    Vector xp;
    Matrix basis;
    std::vector<int> sizes;
    Blocks g0;                                            // G0_b + Σ_k xp_k G_bk
    std::vector<std::vector<std::pair<int, Matrix>>> a;  // per reduced scalar
    Vector c;
};

Reduced reduce(const ConicForm& form, std::string& infeasible_reason) {
    Reduced r;
    const int n = form.num_scalars;
    if (form.eq_matrix.rows() == 0) {
        r.xp = Vector::Zero(n);
        r.basis = Matrix::Identity(n, n);
    } else {
        Eigen::JacobiSVD<Matrix> svd(form.eq_matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv(0) : 0.0;
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > 1e-12 * std::max(1.0, smax) * std::max(form.eq_matrix.rows(), form.eq_matrix.cols())) {
                ++rank;
            }
        }
        svd.setThreshold(1e-12 * std::max<Eigen::Index>(form.eq_matrix.rows(), form.eq_matrix.cols()));
        r.xp = svd.solve(form.eq_rhs);
        const double res = (form.eq_matrix * r.xp - form.eq_rhs).norm();
        if (res > 1e-9 * (1.0 + form.eq_rhs.norm())) {
            std::ostringstream os;
            os << "inconsistent equalities (residual " << res << ")";
            infeasible_reason = os.str();
        }
        r.basis = svd.matrixV().rightCols(n - rank);
    }
    const int m = static_cast<int>(r.basis.cols());
    r.a.resize(m);
    for (const auto& blk : form.blocks) {
        const int b = static_cast<int>(r.sizes.size());
        r.sizes.push_back(blk.size);
        Matrix g0 = blk.g0;
        for (int k = 0; k < n; ++k) {
            if (r.xp(k) != 0.0) {
                g0 += r.xp(k) * blk.g[k];
            }
        }
        r.g0.push_back(g0);
        for (int j = 0; j < m; ++j) {
            Matrix ajb = Matrix::Zero(blk.size, blk.size);
            for (int k = 0; k < n; ++k) {
                if (r.basis(k, j) != 0.0 && blk.g[k].size() > 0) {
                    ajb += r.basis(k, j) * blk.g[k];
                }
            }
            if (ajb.cwiseAbs().maxCoeff() > 1e-15) {
                r.a[j].push_back({b, std::move(ajb)});
            }
        }
    }
    r.c = r.basis.transpose() * form.c;
    return r;
}

// Box |z_j| ≤ radius as 1×1 blocks, keeping the barrier bounded.
void add_box(Sdp& sdp, int count, double radius) {
    for (int j = 0; j < count; ++j) {
        for (double sign : {1.0, -1.0}) {
            const int b = sdp.blocks();
            sdp.sizes.push_back(1);
            sdp.cmat.push_back(Matrix::Constant(1, 1, -radius));
            sdp.a[j].push_back({b, Matrix::Constant(1, 1, sign)});
        }
    }
}

std::string describe(const char* phase, const IpmState& st) {
    static const char* names[] = {"converged", "iteration limit", "stalled", "diverged"};
    std::ostringstream os;
    os.precision(3);
    os << phase << " " << names[static_cast<int>(st.exit)] << " after " << st.iterations << " iterations (pobj "
       << st.pobj << ", dobj " << st.dobj << ", relp " << st.relp << ", reld " << st.reld << ", gap " << st.relgap
       << ")";
    return os.str();
}

}  // namespace

BackendResult InteriorPointBackend::solve(const ConicForm& form, const SolverOptions& options) const {
    BackendResult result;
    if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
        throw InvalidInput("solver options need tolerance > 0 and max_iterations >= 1");
    }

    std::string reason;
    const Reduced red = reduce(form, reason);
    if (!reason.empty()) {
        result.status = BackendStatus::infeasible;
        result.diagnostics = reason;
        return result;
    }
    const int m = static_cast<int>(red.basis.cols());
    auto objective_at = [&](const Vector& x) { return form.c.dot(x) + form.c0; };

    double g0_scale = 0.0;
    for (const auto& g : red.g0) {
        g0_scale = std::max(g0_scale, spectral_norm(g));
    }
    const double threshold = options.tolerance * (1.0 + g0_scale);

    if (m == 0) {
        // Fully determined by the equalities.
        double lmin = std::numeric_limits<double>::infinity();
        for (const auto& g : red.g0) {
            lmin = std::min(lmin, lambda_min(g));
        }
        result.x = red.xp;
        result.primal_objective = result.dual_objective = objective_at(red.xp);
        result.status = lmin >= -threshold ? (form.has_objective ? BackendStatus::optimal : BackendStatus::feasible)
                                           : BackendStatus::infeasible;
        result.diagnostics = "no free scalars after equality elimination";
        return result;
    }

    // Phase I: minimize t s.t. S_b(z) + tI ⪰ 0, |z_j| ≤ R.
    Sdp p1;
    p1.sizes = red.sizes;
    for (const auto& g : red.g0) {
        p1.cmat.push_back(-g);
    }
    p1.a = red.a;
    p1.a.emplace_back();
    for (int b = 0; b < static_cast<int>(red.sizes.size()); ++b) {
        p1.a[m].push_back({b, Matrix::Identity(red.sizes[b], red.sizes[b])});
    }
    p1.c = Vector::Zero(m + 1);
    p1.c(m) = 1.0;
    const double box1 = 1e4 * (1.0 + red.xp.cwiseAbs().maxCoeff());
    add_box(p1, m, box1);

    const IpmState s1 = run_ipm(p1, options);
    result.iterations = s1.iterations;
    std::string diag = describe("phase I", s1);
    const double tstar = s1.z(m);
    {
        std::ostringstream os;
        os.precision(6);
        os << "; phase I t* = " << tstar << " (threshold " << threshold << ")";
        diag += os.str();
    }

    if (s1.exit != IpmExit::converged) {
        // A certified dual bound above the threshold still proves infeasibility.
        if (s1.reld <= 1e-6 && s1.dobj > threshold && std::isfinite(s1.dobj)) {
            result.status = BackendStatus::infeasible;
        } else if (tstar <= threshold && min_eigenvalue(slack(p1, s1.z)) >= -threshold) {
            // Unconverged but already strictly inside the shifted cone.
            result.status = BackendStatus::feasible;
            result.x = red.xp + red.basis * s1.z.head(m);
        } else {
            result.status = BackendStatus::failure;
        }
        result.diagnostics = diag;
        if (result.status != BackendStatus::feasible) {
            return result;
        }
    } else if (tstar > threshold) {
        result.status = BackendStatus::infeasible;
        result.diagnostics = diag;
        return result;
    } else {
        result.status = BackendStatus::feasible;
        result.x = red.xp + red.basis * s1.z.head(m);
    }
    result.primal_objective = objective_at(result.x);
    result.dual_objective = result.primal_objective;

    if (!form.has_objective) {
        result.diagnostics = diag;
        return result;
    }

    // Phase II: the objective from a cold infeasible start.
    Sdp p2;
    p2.sizes = red.sizes;
    for (const auto& g : red.g0) {
        p2.cmat.push_back(-g);
    }
    p2.a = red.a;
    p2.c = red.c;
    const double box2 = 1e9 * (1.0 + red.xp.cwiseAbs().maxCoeff() + s1.z.head(m).cwiseAbs().maxCoeff());
    add_box(p2, m, box2);

    const IpmState s2 = run_ipm(p2, options);
    result.iterations += s2.iterations;
    diag += "; " + describe("phase II", s2);

    const Vector x2 = red.xp + red.basis * s2.z;
    const bool on_box = s2.z.cwiseAbs().maxCoeff() > 0.5 * box2;
    if (s2.exit == IpmExit::converged && !on_box) {
        result.status = BackendStatus::optimal;
        result.x = x2;
        result.primal_objective = objective_at(x2);
        result.dual_objective = s2.dobj + (form.c.dot(red.xp) + form.c0);
        result.diagnostics = diag;
        return result;
    }
    if (on_box || s2.exit == IpmExit::diverged) {
        result.status = BackendStatus::unbounded;
        result.diagnostics = diag + "; objective appears unbounded below";
        return result;
    }
    // Keep the better of the last phase II iterate (if feasible) and the phase I point.
    Blocks s_true = slack(p2, s2.z);
    s_true.resize(red.sizes.size());
    if (s2.z.allFinite() && min_eigenvalue(s_true) >= -threshold && objective_at(x2) < result.primal_objective) {
        result.x = x2;
        result.primal_objective = objective_at(x2);
    }
    result.status = BackendStatus::feasible;
    result.diagnostics = diag + "; phase II did not converge, returning a feasible point";
    return result;
}

const ConicBackend& default_backend() {
    static const InteriorPointBackend backend;
    return backend;
}

}  // namespace hyobs::lmi
