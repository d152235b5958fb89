#include "hyobs/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace hyobs {

Matrix symmetric_blocks(const Matrix& tl, const Matrix& tr, const Matrix& br) {
    if (tl.rows() != tl.cols() || br.rows() != br.cols() || tr.rows() != tl.rows() || tr.cols() != br.rows()) {
        throw DimensionError("symmetric_blocks: inconsistent block shapes");
    }
    const auto n1 = tl.rows();
    const auto n2 = br.rows();
    Matrix out(n1 + n2, n1 + n2);
    out.topLeftCorner(n1, n1) = tl;
    out.topRightCorner(n1, n2) = tr;
    out.bottomLeftCorner(n2, n1) = tr.transpose();
    out.bottomRightCorner(n2, n2) = br;
    return out;
}

double lambda_max(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double lambda_min(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Matrix expm(const Matrix& m) { return m.exp(); }

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& block) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << block << " must be " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
        throw DimensionError(os.str());
    }
}

void require_finite(const Matrix& m, const std::string& block) {
    if (!m.allFinite()) {
        throw InvalidInput(block + " contains non-finite entries");
    }
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace hyobs
