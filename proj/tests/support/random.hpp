#pragma once

#include <algorithm>
#include <random>

#include <crossprod/crossprod.hpp>

namespace testing_support
{

using namespace crossprod;

inline Matrix random_unitary(int n, std::mt19937& rng)
{
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(n, n);
}

struct SystemShape
{
    int max_blocks = 3;
    int max_dim = 3;
    bool unitaries = true;
    // probability that a source is tried for a given target
    double fill = 0.6;
};

/// A random endomorphism in canonical form: multiplicities fill each target
/// block up to its size, the rest is padding.
inline Endomorphism random_endomorphism(std::mt19937& rng, const SystemShape& s = {})
{
    std::uniform_int_distribution<int> nb(1, s.max_blocks), nd(1, s.max_dim);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const int B = nb(rng);
    std::vector<int> dims(B);
    for (int& d : dims)
        d = nd(rng);
    FdAlgebra A(dims);
    std::vector<std::vector<int>> m(B, std::vector<int>(B, 0));
    std::vector<Matrix> u;
    for (int c = 0; c < B; ++c)
    {
        int room = dims[c];
        std::vector<int> order(B);
        for (int b = 0; b < B; ++b)
            order[b] = b;
        std::shuffle(order.begin(), order.end(), rng);
        for (int b : order)
        {
            if (coin(rng) > s.fill)
                continue;
            const int most = room / dims[b];
            if (most == 0)
                continue;
            std::uniform_int_distribution<int> pick(1, most);
            m[c][b] = pick(rng);
            room -= m[c][b] * dims[b];
        }
        u.push_back(s.unitaries ? random_unitary(dims[c], rng) : Matrix::Identity(dims[c], dims[c]));
    }
    return Endomorphism(A, m, u);
}

inline BlockIdeal random_ideal(const FdAlgebra& A, std::mt19937& rng)
{
    std::bernoulli_distribution coin(0.5);
    std::vector<int> m;
    for (int b = 0; b < A.num_blocks(); ++b)
        if (coin(rng))
            m.push_back(b);
    return BlockIdeal(A, m);
}

/// A random ideal orthogonal to ker alpha.
inline BlockIdeal random_orthogonal_ideal(const Endomorphism& al, std::mt19937& rng)
{
    return random_ideal(al.algebra(), rng).intersect(annihilator(kernel_ideal(al)));
}

/// A random automorphism: a permutation of equal-sized blocks twisted by unitaries.
inline Endomorphism random_automorphism(std::mt19937& rng, int max_blocks = 3, int max_dim = 2)
{
    std::uniform_int_distribution<int> nb(1, max_blocks), nd(1, max_dim);
    const int B = nb(rng);
    const int n = nd(rng);
    std::vector<int> perm(B);
    for (int b = 0; b < B; ++b)
        perm[b] = b;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<int>> m(B, std::vector<int>(B, 0));
    std::vector<Matrix> u;
    for (int c = 0; c < B; ++c)
    {
        m[c][perm[c]] = 1;
        u.push_back(random_unitary(n, rng));
    }
    return Endomorphism(FdAlgebra(std::vector<int>(B, n)), m, u);
}

inline Endomorphism sys1()
{
    return Endomorphism(FdAlgebra({1, 1, 1}), {{0, 1, 0}, {0, 0, 1}, {0, 0, 1}});
}

inline Endomorphism sys2()
{
    return Endomorphism(FdAlgebra({1, 1}), {{1, 0}, {1, 0}});
}

/// Random element of M(A) with support in a rows x cols box.
inline MatElement random_box(const System& sys, std::mt19937& rng, int rows, int cols)
{
    return random_mat_element(sys, rng, rows, cols, 0.7);
}

} // namespace testing_support
