#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "prd/market.hpp"
#include "prd/utility.hpp"

namespace prd::testing {

enum class Fam { CobbDouglas, Ces, SeparablePower };

inline const Fam kAllFamilies[] = {Fam::CobbDouglas, Fam::Ces, Fam::SeparablePower};

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(rng));
}

inline Vector random_positive(std::mt19937_64& rng, Eigen::Index m, double lo = 0.1, double hi = 10.0) {
    Vector v(m);
    for (Eigen::Index j = 0; j < m; ++j) v[j] = log_uniform(rng, lo, hi);
    return v;
}

inline UtilitySpec random_utility(std::mt19937_64& rng, Fam fam, Eigen::Index m) {
    std::uniform_real_distribution<double> rho(0.2, 0.8);
    Vector w = random_positive(rng, m);
    switch (fam) {
        case Fam::CobbDouglas: return make_cobb_douglas(w);
        case Fam::Ces: return make_ces(w, rho(rng));
        case Fam::SeparablePower: {
            Vector r(m);
            for (Eigen::Index j = 0; j < m; ++j) r[j] = rho(rng);
            return make_separable_power(w, r);
        }
    }
    return make_cobb_douglas(w);
}

inline MarketSpec random_fisher(std::mt19937_64& rng, Fam fam, std::size_t n, std::size_t m) {
    std::uniform_real_distribution<double> budget(0.5, 2.0);
    std::vector<UtilitySpec> us;
    std::vector<double> e;
    for (std::size_t i = 0; i < n; ++i) {
        us.push_back(random_utility(rng, fam, static_cast<Eigen::Index>(m)));
        e.push_back(budget(rng));
    }
    return make_fisher_market(std::move(us), std::move(e));
}

/// Agent i owns goods i, i + n, i + 2n, ... (needs m >= n).
inline MarketSpec random_exchange(std::mt19937_64& rng, Fam fam, std::size_t n, std::size_t m, double alpha = 0.5) {
    std::vector<UtilitySpec> us;
    std::vector<std::vector<std::size_t>> owned(n);
    for (std::size_t i = 0; i < n; ++i) us.push_back(random_utility(rng, fam, static_cast<Eigen::Index>(m)));
    for (std::size_t j = 0; j < m; ++j) owned[j % n].push_back(j);
    return make_exchange_market(std::move(us), std::move(owned), std::vector<double>(n, alpha));
}

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) v[k++] = x;
    return v;
}

template <class A, class B>
double max_abs(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace prd::testing
