#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matcalc.hpp"

namespace crossprod
{

/// A concrete triple (pi, U, H) with H = C^dim.
///
/// pi is stored through the images of the matrix units: units[b][i*n_b + j] = pi(E_ij of block b).
/// Truncated representations carry a window projection; identities involving U
/// are only asserted after compression by it.
struct Representation
{
    System sys;
    int dim = 0;
    std::vector<std::vector<Matrix>> units;
    Matrix U;
    Matrix window;
    /// Truncation level M of a Toeplitz-type representation, -1 when exact.
    int levels = -1;
    /// Level and amplification copy of each basis vector.
    std::vector<int> level_of;
    std::vector<int> copy_of;

    bool exact() const
    {
        return levels < 0;
    }

    Matrix pi(const AlgElement& a) const
    {
        if (!(a.algebra() == sys.algebra()))
            throw UsageError("element does not belong to the represented algebra");
        Matrix r = Matrix::Zero(dim, dim);
        for (int b = 0; b < sys.algebra().num_blocks(); ++b)
        {
            const int n = sys.algebra().block_dim(b);
            const Matrix& x = a.block(b);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (x(i, j) != Complex(0))
                        r += x(i, j) * units[b][i * n + j];
        }
        return r;
    }

    Matrix pi_unit(int b) const
    {
        return pi(AlgElement::block_unit(sys.algebra(), b));
    }

    /// W X W
    Matrix compress(const Matrix& x) const
    {
        return window * x * window;
    }
    double windowed_norm(const Matrix& x) const
    {
        return spectral_norm(compress(x));
    }

    /// Window restricted to basis vectors of level <= max_level.
    Matrix window_up_to_level(int max_level) const
    {
        Matrix w = window;
        for (int i = 0; i < dim; ++i)
            if (!level_of.empty() && level_of[i] > max_level)
            {
                w.row(i).setZero();
                w.col(i).setZero();
            }
        return w;
    }
};

/// Assemble a representation from user data: images of matrix units, U, optional window.
inline Representation make_representation(const System& sys, std::vector<std::vector<Matrix>> units, Matrix U,
                                          std::optional<Matrix> window = std::nullopt)
{
    Representation r;
    r.sys = sys;
    r.dim = static_cast<int>(U.rows());
    if (U.cols() != r.dim)
        throw UsageError("U must be square");
    const FdAlgebra& A = sys.algebra();
    if (static_cast<int>(units.size()) != A.num_blocks())
        throw UsageError("pi must be given on every block");
    for (int b = 0; b < A.num_blocks(); ++b)
    {
        const int n = A.block_dim(b);
        if (static_cast<int>(units[b].size()) != n * n)
            throw UsageError("block " + std::to_string(b) + " needs " + std::to_string(n * n) +
                             " matrix-unit images");
        for (const Matrix& m : units[b])
            if (m.rows() != r.dim || m.cols() != r.dim)
                throw UsageError("matrix-unit image has wrong size in block " + std::to_string(b));
    }
    r.units = std::move(units);
    r.U = std::move(U);
    r.window = window ? *window : Matrix::Identity(r.dim, r.dim);
    if (r.window.rows() != r.dim || r.window.cols() != r.dim)
        throw UsageError("window has wrong size");
    r.level_of.assign(r.dim, 0);
    r.copy_of.assign(r.dim, 0);
    return r;
}

/// Residuals of the defining identities.
struct RepresentationCheck
{
    double homomorphism = 0;   // pi(E_ij)pi(E_kl) - delta_jk pi(E_il), adjoints, unit
    double covariance = 0;     // W (U pi(a) U* - pi(alpha(a))) W
    double partial_isometry = 0; // W (U U* U - U) W
    bool ok(double tol_hom = 1e-12, double tol_cov = 1e-10) const
    {
        return homomorphism <= tol_hom && covariance <= tol_cov && partial_isometry <= tol_cov;
    }
};

inline RepresentationCheck check_representation(const Representation& rep)
{
    RepresentationCheck c;
    const FdAlgebra& A = rep.sys.algebra();
    Matrix one = Matrix::Zero(rep.dim, rep.dim);
    for (int b = 0; b < A.num_blocks(); ++b)
    {
        const int n = A.block_dim(b);
        for (int i = 0; i < n; ++i)
        {
            one += rep.units[b][i * n + i];
            for (int j = 0; j < n; ++j)
            {
                const Matrix& e = rep.units[b][i * n + j];
                c.homomorphism =
                    std::max(c.homomorphism, (e.adjoint() - rep.units[b][j * n + i]).cwiseAbs().maxCoeff());
                for (int d = 0; d < A.num_blocks(); ++d)
                {
                    const int p = A.block_dim(d);
                    for (int k = 0; k < p; ++k)
                        for (int l = 0; l < p; ++l)
                        {
                            Matrix prod = e * rep.units[d][k * p + l];
                            if (d == b && j == k)
                                prod -= rep.units[b][i * n + l];
                            c.homomorphism = std::max(c.homomorphism, prod.cwiseAbs().maxCoeff());
                        }
                }
                const AlgElement eij = AlgElement::matrix_unit(A, b, i, j);
                Matrix cov = rep.U * rep.units[b][i * n + j] * rep.U.adjoint() - rep.pi(rep.sys.alpha()(eij));
                c.covariance = std::max(c.covariance, spectral_norm(rep.compress(cov)));
            }
        }
    }
    c.homomorphism =
        std::max(c.homomorphism, (one - Matrix::Identity(rep.dim, rep.dim)).cwiseAbs().maxCoeff());
    c.partial_isometry = spectral_norm(rep.compress(rep.U * rep.U.adjoint() * rep.U - rep.U));
    return c;
}

namespace detail
{
inline std::vector<std::vector<AlgElement>> matrix_units(const FdAlgebra& A)
{
    std::vector<std::vector<AlgElement>> e(A.num_blocks());
    for (int b = 0; b < A.num_blocks(); ++b)
    {
        const int n = A.block_dim(b);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                e[b].push_back(AlgElement::matrix_unit(A, b, i, j));
    }
    return e;
}

inline Matrix repeat_diagonal(const Matrix& m, int times)
{
    Matrix r = Matrix::Zero(m.rows() * times, m.cols() * times);
    for (int t = 0; t < times; ++t)
        r.block(t * m.rows(), t * m.cols(), m.rows(), m.cols()) = m;
    return r;
}
} // namespace detail

/// The Toeplitz representation on levels 0..M: level n is the range of
/// pi_0(alpha^n(1)), pi acts on level n through alpha^n and U shifts level n+1
/// down to level n. pi_0 is the identity block representation, repeated
/// base_multiplicity times. The window is levels 0..M-1.
inline Representation toeplitz_truncation(const System& sys, int M, int base_multiplicity = 1)
{
    if (M < 0)
        throw DomainError("truncation level must be nonnegative");
    if (base_multiplicity < 1)
        throw DomainError("base multiplicity must be positive");
    const FdAlgebra& A = sys.algebra();
    const Endomorphism& al = sys.alpha();
    auto pi0 = [&](const AlgElement& a) { return detail::repeat_diagonal(a.as_matrix(), base_multiplicity); };

    std::vector<Matrix> v;
    std::vector<int> off;
    int dim = 0;
    for (int n = 0; n <= M; ++n)
    {
        v.push_back(range_basis(pi0(sys.unit_power(n)), 1e-8));
        off.push_back(dim);
        dim += static_cast<int>(v.back().cols());
    }

    Representation r;
    r.sys = sys;
    r.dim = dim;
    r.levels = M;
    r.level_of.assign(dim, 0);
    r.copy_of.assign(dim, 0);
    for (int n = 0; n <= M; ++n)
        for (Eigen::Index i = 0; i < v[n].cols(); ++i)
            r.level_of[off[n] + i] = n;

    auto units = detail::matrix_units(A);
    r.units.resize(A.num_blocks());
    for (int b = 0; b < A.num_blocks(); ++b)
        for (auto& e : units[b])
        {
            Matrix img = Matrix::Zero(dim, dim);
            AlgElement x = e;
            for (int n = 0; n <= M; ++n)
            {
                const int d = static_cast<int>(v[n].cols());
                if (d > 0)
                    img.block(off[n], off[n], d, d) = v[n].adjoint() * pi0(x) * v[n];
                if (n < M)
                    x = al(x);
            }
            r.units[b].push_back(std::move(img));
        }

    r.U = Matrix::Zero(dim, dim);
    for (int n = 0; n < M; ++n)
        if (v[n].cols() > 0 && v[n + 1].cols() > 0)
            r.U.block(off[n], off[n + 1], v[n].cols(), v[n + 1].cols()) = v[n].adjoint() * v[n + 1];

    r.window = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
        if (r.level_of[i] < M)
            r.window(i, i) = 1.0;
    return r;
}

/// Finite window of the l^2(Z)-amplification: copies -L..L of rep, pi acting
/// diagonally, U mapping copy c into copy c+1 through rep.U. Copy -L is left
/// out of the window since nothing shifts into it.
inline Representation amplify(const Representation& rep, int L)
{
    if (L < 0)
        throw DomainError("amplification radius must be nonnegative");
    const int copies = 2 * L + 1;
    const int d = rep.dim;
    Representation r;
    r.sys = rep.sys;
    r.dim = copies * d;
    r.levels = rep.levels;
    r.units.resize(rep.units.size());
    for (std::size_t b = 0; b < rep.units.size(); ++b)
        for (const Matrix& e : rep.units[b])
            r.units[b].push_back(detail::repeat_diagonal(e, copies));
    r.U = Matrix::Zero(r.dim, r.dim);
    r.window = Matrix::Zero(r.dim, r.dim);
    for (int c = 0; c < copies; ++c)
    {
        if (c + 1 < copies)
            r.U.block((c + 1) * d, c * d, d, d) = rep.U;
        if (c > 0)
            r.window.block(c * d, c * d, d, d) = rep.window;
        for (int i = 0; i < d; ++i)
        {
            r.level_of.push_back(rep.level_of.empty() ? 0 : rep.level_of[i]);
            r.copy_of.push_back(c - L);
        }
    }
    return r;
}

/// Multiplicity data k of an exact representation: pi(a) = sum_b a_b (x) 1_{k_b}.
/// An exact covariant U exists iff m^T k <= k entrywise.
inline std::vector<int> covariance_need(const Endomorphism& al, const std::vector<int>& k)
{
    const int B = al.num_blocks();
    std::vector<int> j(B, 0);
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < B; ++c)
            j[b] += al.multiplicity(c, b) * k[c];
    return j;
}

/// The exact (untruncated) covariant representation with multiplicities k. U
/// maps the first j_b copies of block b onto the slots of alpha(1), so U*U is
/// the projection onto those copies.
inline Representation exact_multiplicity_rep(const System& sys, const std::vector<int>& k)
{
    const FdAlgebra& A = sys.algebra();
    const Endomorphism& al = sys.alpha();
    const int B = A.num_blocks();
    if (static_cast<int>(k.size()) != B)
        throw UsageError("one multiplicity per block expected");
    const std::vector<int> j = covariance_need(al, k);
    for (int b = 0; b < B; ++b)
        if (k[b] < 0 || j[b] > k[b])
            throw DomainError("no exact covariant isometry for these multiplicities (block " + std::to_string(b) +
                              " needs " + std::to_string(j[b]) + " copies)");

    std::vector<int> off(B, 0);
    int dim = 0;
    for (int b = 0; b < B; ++b)
    {
        off[b] = dim;
        dim += A.block_dim(b) * k[b];
    }
    if (dim == 0)
        throw DomainError("representation space is zero");
    // basis index of (block b, copy q, row i)
    auto idx = [&](int b, int q, int i) { return off[b] + q * A.block_dim(b) + i; };

    Representation r;
    r.sys = sys;
    r.dim = dim;
    r.units.resize(B);
    for (int b = 0; b < B; ++b)
    {
        const int n = A.block_dim(b);
        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj)
            {
                Matrix e = Matrix::Zero(dim, dim);
                for (int q = 0; q < k[b]; ++q)
                    e(idx(b, q, i), idx(b, q, jj)) = 1.0;
                r.units[b].push_back(std::move(e));
            }
    }
    r.U = Matrix::Zero(dim, dim);
    std::vector<int> next(B, 0);
    for (int c = 0; c < B; ++c)
    {
        const Matrix& V = al.unitary(c);
        for (int q = 0; q < k[c]; ++q)
        {
            int slot = 0;
            for (int b = 0; b < B; ++b)
                for (int rr = 0; rr < al.multiplicity(c, b); ++rr)
                {
                    const int p = next[b]++;
                    for (int i = 0; i < A.block_dim(b); ++i)
                        for (int row = 0; row < A.block_dim(c); ++row)
                            r.U(idx(c, q, row), idx(b, p, i)) += V(row, slot + i);
                    slot += A.block_dim(b);
                }
        }
    }
    r.window = Matrix::Identity(dim, dim);
    r.level_of.assign(dim, 0);
    r.copy_of.assign(dim, 0);
    return r;
}

/// Search multiplicity vectors with entries <= max_k admitting an exact
/// covariant representation. With a target ideal, only vectors whose covariance
/// ideal equals it (on blocks with k_b > 0) qualify. Faithful choices come first.
inline std::optional<std::vector<int>> find_exact_multiplicities(const Endomorphism& al,
                                                                 const std::optional<BlockIdeal>& target = {},
                                                                 int max_k = 3, bool require_faithful = false)
{
    const int B = al.num_blocks();
    std::optional<std::vector<int>> best;
    std::vector<int> k(B, 0);
    auto admissible = [&](const std::vector<int>& kk) {
        const auto j = covariance_need(al, kk);
        bool nonzero = false;
        for (int b = 0; b < B; ++b)
        {
            if (j[b] > kk[b])
                return false;
            if (kk[b] > 0)
            {
                nonzero = true;
                if (target && target->has(b) != (j[b] == kk[b]))
                    return false;
            }
        }
        return nonzero;
    };
    auto faithful = [&](const std::vector<int>& kk) {
        for (int x : kk)
            if (x == 0)
                return false;
        return true;
    };
    // enumerate in increasing total size
    for (;;)
    {
        if (admissible(k))
        {
            if (faithful(k))
                return k;
            if (!best && !require_faithful)
                best = k;
        }
        int pos = 0;
        while (pos < B && k[pos] == max_k)
            k[pos++] = 0;
        if (pos == B)
            break;
        ++k[pos];
    }
    return best;
}

/// Psi(a) = sum U*^m pi(a_{m,n}) U^n.
inline Matrix psi_evaluate(const Representation& rep, const MatElement& a)
{
    if (!rep.sys.same(a.system()))
        throw UsageError("element and representation belong to different systems");
    const int top = a.max_index();
    if (!rep.exact() && top >= rep.levels)
        throw DomainError("element support needs truncation level >= " + std::to_string(top + 1) +
                          " (representation has " + std::to_string(rep.levels) + ")");
    std::vector<Matrix> pw{Matrix::Identity(rep.dim, rep.dim)};
    for (int n = 1; n <= top; ++n)
        pw.push_back(pw.back() * rep.U);
    Matrix r = Matrix::Zero(rep.dim, rep.dim);
    for (const auto& [ij, x] : a.entries())
        r += pw[ij.first].adjoint() * rep.pi(x) * pw[ij.second];
    return r;
}

/// Ideals attached to a representation and the consistency checks between them.
struct KernelReport
{
    BlockIdeal I;            // {b : U*U pi(e_b) = 0}
    BlockIdeal J;            // {b : U*U pi(e_b) = pi(e_b)}
    BlockIdeal ker_pi;       // {b : pi(e_b) = 0}
    BlockIdeal ker_pi_alpha; // {b : pi(alpha(e_b)) = 0}
    bool i_is_ker_pi_alpha = false;
    bool intersection_is_ker_pi = false;
    bool faithful = false;
    std::string warning;

    bool ok() const
    {
        return i_is_ker_pi_alpha && intersection_is_ker_pi;
    }
};

inline KernelReport kernel_report(const Representation& rep, double tol = 1e-9)
{
    const FdAlgebra& A = rep.sys.algebra();
    const int B = A.num_blocks();
    const Matrix uu = rep.U.adjoint() * rep.U;
    const Matrix one = Matrix::Identity(rep.dim, rep.dim);
    std::vector<int> I, J, K, KA;
    for (int b = 0; b < B; ++b)
    {
        const AlgElement e = AlgElement::block_unit(A, b);
        const Matrix p = rep.pi(e);
        if (rep.windowed_norm(uu * p) <= tol)
            I.push_back(b);
        if (rep.windowed_norm((uu - one) * p) <= tol)
            J.push_back(b);
        if (rep.windowed_norm(p) <= tol)
            K.push_back(b);
        if (rep.windowed_norm(rep.pi(rep.sys.alpha()(e))) <= tol)
            KA.push_back(b);
    }
    KernelReport r{BlockIdeal(A, I), BlockIdeal(A, J), BlockIdeal(A, K), BlockIdeal(A, KA)};
    r.faithful = r.ker_pi.is_empty();
    if (r.faithful || rep.exact())
    {
        r.i_is_ker_pi_alpha = r.I == r.ker_pi_alpha;
        r.intersection_is_ker_pi = r.I.intersect(r.J) == r.ker_pi;
    }
    else
    {
        r.warning = "pi is not injective on the window; only inclusions are checked";
        r.i_is_ker_pi_alpha = r.ker_pi_alpha.subset_of(r.I);
        r.intersection_is_ker_pi = r.ker_pi.subset_of(r.I.intersect(r.J));
    }
    return r;
}

/// The ideal of covariance {a : U*U pi(a) = pi(a)}.
inline BlockIdeal covariance_ideal(const Representation& rep, double tol = 1e-9)
{
    return kernel_report(rep, tol).J;
}

/// The representation seen as a representation of the system correspondence
/// X = alpha(1)A through t(x) = U* pi(x).
struct BridgeReport
{
    double right_action = 0;  // t(x a) - t(x) pi(a)
    double inner_product = 0; // t(x)* t(y) - pi(<x,y>)
    double left_action = 0;   // t(alpha(a) x) - pi(a) t(x)
    double phi_theta = 0;     // alpha(a) z - Theta_{alpha(a), alpha(1)} z
    double reconstruction = 0; // t(alpha(1))* - U
    BlockIdeal correspondence_ideal;
    BlockIdeal covariance_ideal;
    int x_dim = 0;
    bool windowed = false;

    bool ok(double tol = 1e-9) const
    {
        return right_action <= tol && inner_product <= tol && left_action <= tol && phi_theta <= tol &&
               reconstruction <= tol && correspondence_ideal == covariance_ideal;
    }
};

/// Basis of X = alpha(1)A: for each block c, v_r e_j^T with v_r an orthonormal
/// basis of the range of alpha(1)_c.
inline std::vector<AlgElement> correspondence_basis(const Endomorphism& al)
{
    const FdAlgebra& A = al.algebra();
    const AlgElement p = al(AlgElement::identity(A));
    std::vector<AlgElement> basis;
    for (int c = 0; c < A.num_blocks(); ++c)
    {
        const Matrix v = range_basis(p.block(c), 1e-8);
        for (Eigen::Index r = 0; r < v.cols(); ++r)
            for (int j = 0; j < A.block_dim(c); ++j)
            {
                AlgElement x = AlgElement::zero(A);
                x.block(c).col(j) = v.col(r);
                basis.push_back(std::move(x));
            }
    }
    return basis;
}

inline BridgeReport correspondence_bridge(const Representation& rep, double tol = 1e-9)
{
    BridgeReport r;
    r.windowed = !rep.exact();
    const FdAlgebra& A = rep.sys.algebra();
    const Endomorphism& al = rep.sys.alpha();
    const auto X = correspondence_basis(al);
    r.x_dim = static_cast<int>(X.size());
    const Matrix Ustar = rep.U.adjoint();
    auto t = [&](const AlgElement& x) -> Matrix { return Ustar * rep.pi(x); };

    std::vector<Matrix> tx;
    for (const auto& x : X)
        tx.push_back(t(x));
    const auto units = detail::matrix_units(A);
    for (std::size_t p = 0; p < X.size(); ++p)
    {
        for (const auto& blk : units)
            for (const AlgElement& a : blk)
            {
                r.right_action = std::max(r.right_action, rep.windowed_norm(t(X[p] * a) - tx[p] * rep.pi(a)));
                const AlgElement phi = al(a);
                r.left_action = std::max(r.left_action, rep.windowed_norm(t(phi * X[p]) - rep.pi(a) * tx[p]));
                const AlgElement one1 = al(AlgElement::identity(A));
                const AlgElement theta = phi * (one1.adjoint() * X[p]);
                r.phi_theta = std::max(r.phi_theta, (phi * X[p] - theta).norm());
            }
        for (std::size_t q = 0; q < X.size(); ++q)
            r.inner_product = std::max(r.inner_product,
                                       rep.windowed_norm(tx[p].adjoint() * tx[q] - rep.pi(X[p].adjoint() * X[q])));
    }
    r.reconstruction = rep.windowed_norm(t(al(AlgElement::identity(A))).adjoint() - rep.U);

    std::vector<int> members;
    for (int b = 0; b < A.num_blocks(); ++b)
    {
        const AlgElement e = AlgElement::block_unit(A, b);
        if (rep.windowed_norm(Ustar * rep.pi(al(e)) * rep.U - rep.pi(e)) <= tol)
            members.push_back(b);
    }
    r.correspondence_ideal = BlockIdeal(A, members);
    r.covariance_ideal = covariance_ideal(rep, tol);
    return r;
}

namespace detail
{
/// Orthonormal basis of a growing span of matrices, in the Frobenius inner product.
class MatrixSpan
{
public:
    explicit MatrixSpan(double tol = 1e-9) : tol_(tol) {}

    /// Adds m if it is not (numerically) in the span; returns true if the span grew.
    bool add(const Matrix& m)
    {
        Vector v = Eigen::Map<const Vector>(m.data(), m.size());
        const double scale = v.norm();
        if (scale <= tol_)
            return false;
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& q : basis_)
                v -= q.dot(v) * q;
        if (v.norm() <= tol_ * std::max(1.0, scale))
            return false;
        basis_.push_back(v / v.norm());
        return true;
    }

    /// Frobenius distance from m to the span.
    double residual(const Matrix& m) const
    {
        Vector v = Eigen::Map<const Vector>(m.data(), m.size());
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& q : basis_)
                v -= q.dot(v) * q;
        return v.norm();
    }

    int size() const
    {
        return static_cast<int>(basis_.size());
    }

private:
    double tol_;
    std::vector<Vector> basis_;
};
} // namespace detail

/// The coefficient algebra B generated by U*^k pi(A) U^k, and the checks that
/// make U(.)U* and the transfer operator L(.) = U*(.)U act on it.
struct CoefficientReport
{
    int dim = 0;    // dim B
    int pi_dim = 0; // dim pi(A)
    int iterations = 0;
    double u_b_ustar = 0;     // U B U* in B
    double ustar_b_u = 0;     // U* B U in B
    double uu_in_b = 0;       // U*U in B
    double uu_central = 0;    // [U*U, b]
    double transfer_alpha = 0; // L(alpha(b)) - U*U b
    double transfer_module = 0; // L(alpha(a) b) - a L(b)
    std::vector<Matrix> basis;

    bool ok(double tol = 1e-9) const
    {
        return u_b_ustar <= tol && ustar_b_u <= tol && uu_in_b <= tol && uu_central <= tol &&
               transfer_alpha <= tol && transfer_module <= tol;
    }
};

inline CoefficientReport coefficient_algebra(const Representation& rep, int n_max, int max_iterations = 32,
                                             int max_dim = 4096)
{
    if (n_max < 0)
        throw DomainError("n_max must be nonnegative");
    CoefficientReport rpt;
    const int d = rep.dim;
    detail::MatrixSpan span;
    std::vector<Matrix>& basis = rpt.basis;
    auto push = [&](const Matrix& m) {
        if (span.add(m))
            basis.push_back(m);
    };
    push(Matrix::Identity(d, d));
    Matrix uk = Matrix::Identity(d, d);
    for (int k = 0; k <= n_max; ++k)
    {
        for (const auto& blk : rep.units)
            for (const Matrix& e : blk)
                push(uk.adjoint() * e * uk);
        if (k == 0)
        {
            detail::MatrixSpan s;
            for (const auto& blk : rep.units)
                for (const Matrix& e : blk)
                    s.add(e);
            rpt.pi_dim = s.size();
        }
        uk = uk * rep.U;
    }
    // close under multiplication
    std::size_t done = 0;
    for (;;)
    {
        if (rpt.iterations >= max_iterations || static_cast<int>(basis.size()) > max_dim)
            throw ResourceError("coefficient algebra did not stabilize; reached dimension " +
                                std::to_string(basis.size()) + " after " + std::to_string(rpt.iterations) +
                                " iterations");
        ++rpt.iterations;
        const std::size_t n = basis.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = (i < done ? done : 0); j < n; ++j)
            {
                push(basis[i] * basis[j]);
                push(basis[j] * basis[i]);
            }
        if (basis.size() == n)
            break;
        done = n;
    }
    rpt.dim = static_cast<int>(basis.size());

    // windowed membership tests
    detail::MatrixSpan wspan;
    for (const Matrix& b : basis)
        wspan.add(rep.compress(b));
    auto membership = [&](const Matrix& m) { return wspan.residual(rep.compress(m)); };
    const Matrix& U = rep.U;
    const Matrix Us = U.adjoint();
    const Matrix uu = Us * U;
    rpt.uu_in_b = membership(uu);
    for (const Matrix& b : basis)
    {
        rpt.u_b_ustar = std::max(rpt.u_b_ustar, membership(U * b * Us));
        rpt.ustar_b_u = std::max(rpt.ustar_b_u, membership(Us * b * U));
        rpt.uu_central = std::max(rpt.uu_central, rep.windowed_norm(uu * b - b * uu));
        rpt.transfer_alpha = std::max(rpt.transfer_alpha, rep.windowed_norm(Us * (U * b * Us) * U - uu * b));
    }
    const std::size_t lim = std::min<std::size_t>(basis.size(), 40);
    for (std::size_t i = 0; i < lim; ++i)
        for (std::size_t j = 0; j < lim; ++j)
        {
            const Matrix& a = basis[i];
            const Matrix& b = basis[j];
            rpt.transfer_module =
                std::max(rpt.transfer_module, rep.windowed_norm(Us * (U * a * Us * b) * U - a * (Us * b * U)));
        }
    return rpt;
}

/// Largest commutator norm between U*^n U^n and pi(A), n = 1..n_max, on the window.
inline double iterated_commutant_residual(const Representation& rep, int n_max)
{
    double r = 0;
    Matrix un = Matrix::Identity(rep.dim, rep.dim);
    for (int n = 1; n <= n_max; ++n)
    {
        un = un * rep.U;
        const Matrix p = un.adjoint() * un;
        for (const auto& blk : rep.units)
            for (const Matrix& e : blk)
                r = std::max(r, rep.windowed_norm(p * e - e * p));
    }
    return r;
}

} // namespace crossprod
