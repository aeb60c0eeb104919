#pragma once

#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crossprod
{

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Inputs that do not fit together (mismatched algebras, bad indices, malformed files).
class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A computation hit a configured size or iteration budget.
class ResourceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Tolerances shared by all comparisons of computed reals.
struct Tolerance
{
    /// generic comparison tolerance
    double compare = 1e-9;
    /// entries of M(A) below this norm are dropped
    double prune = 1e-14;
    /// homomorphism and unitarity checks on generators
    double identity = 1e-12;
};

inline Tolerance& global_tolerance()
{
    static Tolerance tol = [] {
        Tolerance t;
        if (const char* env = std::getenv("CROSSPROD_TOL"))
        {
            char* end = nullptr;
            double v = std::strtod(env, &end);
            if (end != env && v > 0)
                t.compare = v;
        }
        return t;
    }();
    return tol;
}

/// Spectral norm of a complex matrix, via the largest eigenvalue of m* m.
inline double spectral_norm(const Matrix& m)
{
    if (m.size() == 0)
        return 0.0;
    // Work on the smaller Gram matrix.
    Matrix gram = m.rows() < m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    double top = solver.eigenvalues().maxCoeff();
    return top > 0 ? std::sqrt(top) : 0.0;
}

/// Orthonormal basis (columns) of the range of a matrix, numerical rank by tolerance.
inline Matrix range_basis(const Matrix& m, double tol = 1e-10)
{
    if (m.size() == 0)
        return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol)
            ++rank;
    return svd.matrixU().leftCols(rank);
}

inline bool is_unitary(const Matrix& v, double tol)
{
    if (v.rows() != v.cols())
        return false;
    return (v.adjoint() * v - Matrix::Identity(v.rows(), v.cols())).norm() <= tol;
}

} // namespace crossprod
