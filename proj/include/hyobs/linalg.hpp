#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hyobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a matrix block has the wrong shape. The message names the block.
class DimensionError : public InvalidInput {
  public:
    using InvalidInput::InvalidInput;
};

// He(M) = M + Mᵀ
inline Matrix he(const Matrix& m) { return m + m.transpose(); }

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline Matrix transposed(const Matrix& m) { return m.transpose(); }

/// Symmetric 2x2 block matrix [[tl, tr], [trᵀ, br]].
Matrix symmetric_blocks(const Matrix& tl, const Matrix& tr, const Matrix& br);

double lambda_max(const Matrix& sym);
double lambda_min(const Matrix& sym);

/// Largest singular value.
double spectral_norm(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol = 0.0);

/// Matrix exponential e^{m}.
Matrix expm(const Matrix& m);

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& block);

void require_finite(const Matrix& m, const std::string& block);

/// "%.17g": 17 significant digits, enough to round-trip any double.
std::string format_real(double v);

}  // namespace hyobs
