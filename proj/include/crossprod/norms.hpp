#pragma once

#include <cmath>
#include <map>

#include "reps.hpp"

namespace crossprod
{

/// A triple (A, alpha, J) with J orthogonal to I = ker alpha.
class NormContext
{
public:
    NormContext(System sys, BlockIdeal J) : sys_(std::move(sys)), J_(std::move(J)), I_(kernel_ideal(sys_.alpha()))
    {
        J_.require_same(sys_.algebra());
        if (!J_.orthogonal_to(I_))
            throw DomainError("ideal J meets ker alpha; reduce the triple first");
    }

    const System& system() const
    {
        return sys_;
    }
    const BlockIdeal& J() const
    {
        return J_;
    }
    const BlockIdeal& I() const
    {
        return I_;
    }

private:
    System sys_;
    BlockIdeal J_;
    BlockIdeal I_;
};

/// Exact norm of a k-diagonal in C*(A, alpha, J).
///
/// With rows 0..N and partial sums p_i = alpha(p_{i-1}) + a_i the norm is
/// max( max_i d(p_i, J), d(p_N, ker alpha) ). Rows past N only iterate alpha on
/// p_N, and those terms are dominated by d(p_N, ker alpha).
inline double diagonal_norm(const NormContext& ctx, const DiagonalPart& d)
{
    if (d.rows.empty())
        return 0.0;
    const Endomorphism& al = ctx.system().alpha();
    const bool flip = d.k < 0;
    const int N = d.max_row();
    AlgElement p = AlgElement::zero(ctx.system().algebra());
    double best = 0;
    for (int i = 0; i <= N; ++i)
    {
        if (i > 0)
            p = al(p);
        auto it = d.rows.find(i);
        if (it != d.rows.end())
            p += flip ? it->second.adjoint() : it->second;
        best = std::max(best, distance_to_ideal(p, ctx.J()));
    }
    return std::max(best, distance_to_ideal(p, ctx.I()));
}

inline std::map<int, double> per_diagonal_norms(const NormContext& ctx, const MatElement& a)
{
    std::map<int, double> r;
    for (const auto& [k, d] : diagonals(a))
        r[k] = diagonal_norm(ctx, d);
    return r;
}

/// |||a|||_J = sum over k of the k-diagonal norms.
inline double seminorm(const NormContext& ctx, const MatElement& a)
{
    double s = 0;
    for (const auto& [k, v] : per_diagonal_norms(ctx, a))
        s += v;
    return s;
}

struct NormEstimate
{
    /// r_k for k = 1..(number computed)
    std::vector<double> sequence;
    double lower = 0; // largest diagonal norm
    double upper = 0; // seminorm
    bool complete = true;
    std::string note;
};

/// r_k = ||N_0((a a*)^{2k})||^{1/(4k)}, k = 1..k_max.
///
/// The element is scaled by its largest diagonal norm and running powers are
/// renormalized, so that r_k is formed in log space. If a power exceeds
/// max_entries nonzero entries a ResourceError is thrown; the partial sequence
/// is available through the estimate passed in.
inline NormEstimate norm_estimate(const NormContext& ctx, const MatElement& a, int k_max,
                                  std::size_t max_entries = 20000, NormEstimate* partial = nullptr)
{
    if (k_max < 1)
        throw DomainError("k_max must be at least 1");
    NormEstimate est;
    const auto per = per_diagonal_norms(ctx, a);
    for (const auto& [k, v] : per)
    {
        est.lower = std::max(est.lower, v);
        est.upper += v;
    }
    if (est.lower == 0.0)
    {
        est.sequence.assign(k_max, 0.0);
        return est;
    }
    const MatElement b = (Complex(1.0 / est.lower)) * a;
    MatElement c = star(b, adjoint(b));
    const MatElement c2 = star(c, c);
    MatElement power = c2;
    double log_scale = 0;
    for (int k = 1; k <= k_max; ++k)
    {
        if (k > 1)
            power = star(power, c2);
        if (power.size() > max_entries)
        {
            est.complete = false;
            est.note = "entry budget exceeded at k = " + std::to_string(k);
            if (partial)
                *partial = est;
            throw ResourceError(est.note + " (" + std::to_string(power.size()) + " entries)");
        }
        // renormalize the running power
        double m = 0;
        for (const auto& [_, x] : power.entries())
            m = std::max(m, x.max_abs());
        if (m > 0)
        {
            power *= Complex(1.0 / m);
            log_scale += std::log(m);
        }
        const double dn = diagonal_norm(ctx, n_k(power, 0));
        const double r = dn > 0 ? est.lower * std::exp((log_scale + std::log(dn)) / (4.0 * k)) : 0.0;
        est.sequence.push_back(r);
    }
    return est;
}

/// ||Psi(diag a)|| - ||Psi(a)|| on the window of rep; property (*) holds for
/// this sample when the value is at most the tolerance.
inline double property_star_gap(const MatElement& a, const Representation& rep)
{
    const double full = rep.windowed_norm(psi_evaluate(rep, a));
    const double diag = rep.windowed_norm(psi_evaluate(rep, main_diagonal(a)));
    return diag - full;
}

} // namespace crossprod
