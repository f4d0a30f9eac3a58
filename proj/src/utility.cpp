#include "prd/utility.hpp"

#include <cmath>
#include <string>

#include "prd/error.hpp"

namespace prd {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_weights(const Vector& a) {
    if (a.size() == 0) throw Error(Errc::UtilityParamInvalid, "utility has no goods");
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (!std::isfinite(a[j]) || a[j] <= 0.0)
            throw Error(Errc::UtilityParamInvalid,
                        "weight " + std::to_string(j) + " must be positive, got " + std::to_string(a[j]));
    }
}

void check_exponent(double rho, const char* what) {
    if (!(rho > 0.0 && rho < 1.0))
        throw Error(Errc::UtilityParamInvalid,
                    std::string(what) + " must lie in (0,1), got " + std::to_string(rho));
}

void check_bundle(std::span<const double> x, std::size_t m) {
    if (x.size() != m)
        throw Error(Errc::LengthMismatch,
                    "bundle has " + std::to_string(x.size()) + " goods, utility has " + std::to_string(m));
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] > 0.0) || !std::isfinite(x[j]))
            throw Error(Errc::NonPositiveBundle, "x_" + std::to_string(j) + " = " + std::to_string(x[j]));
    }
}

std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

bool operator==(const CobbDouglas& a, const CobbDouglas& b) {
    return a.weights.size() == b.weights.size() && a.weights == b.weights;
}

bool operator==(const Ces& a, const Ces& b) {
    return a.rho == b.rho && a.weights.size() == b.weights.size() && a.weights == b.weights;
}

bool operator==(const SeparablePower& a, const SeparablePower& b) {
    return a.weights.size() == b.weights.size() && a.rhos.size() == b.rhos.size() && a.weights == b.weights &&
           a.rhos == b.rhos;
}

CobbDouglas make_cobb_douglas(Vector weights) {
    check_weights(weights);
    const double total = weights.sum();
    if (std::abs(total - 1.0) > 1e-12) weights /= total;
    return CobbDouglas{std::move(weights)};
}

Ces make_ces(Vector weights, double rho) {
    check_weights(weights);
    check_exponent(rho, "CES rho");
    return Ces{std::move(weights), rho};
}

SeparablePower make_separable_power(Vector weights, Vector rhos) {
    check_weights(weights);
    if (rhos.size() != weights.size())
        throw Error(Errc::UtilityParamInvalid, "separable power needs one exponent per good");
    for (Eigen::Index j = 0; j < rhos.size(); ++j) check_exponent(rhos[j], "separable exponent");
    return SeparablePower{std::move(weights), std::move(rhos)};
}

void validate_utility(const UtilitySpec& u) {
    std::visit(overloaded{
                   [](const CobbDouglas& cd) {
                       check_weights(cd.weights);
                       if (std::abs(cd.weights.sum() - 1.0) > 1e-12)
                           throw Error(Errc::UtilityParamInvalid, "Cobb-Douglas weights must sum to 1");
                   },
                   [](const Ces& ces) {
                       check_weights(ces.weights);
                       check_exponent(ces.rho, "CES rho");
                   },
                   [](const SeparablePower& sp) {
                       check_weights(sp.weights);
                       if (sp.rhos.size() != sp.weights.size())
                           throw Error(Errc::UtilityParamInvalid, "separable power needs one exponent per good");
                       for (Eigen::Index j = 0; j < sp.rhos.size(); ++j)
                           check_exponent(sp.rhos[j], "separable exponent");
                   },
               },
               u);
}

std::size_t goods_count(const UtilitySpec& u) {
    return std::visit([](const auto& f) { return static_cast<std::size_t>(f.weights.size()); }, u);
}

std::string_view family_name(const UtilitySpec& u) {
    return std::visit(overloaded{
                          [](const CobbDouglas&) { return std::string_view("cobb_douglas"); },
                          [](const Ces&) { return std::string_view("ces"); },
                          [](const SeparablePower&) { return std::string_view("separable_power"); },
                      },
                      u);
}

bool is_homogeneous(const UtilitySpec& u) {
    return !std::holds_alternative<SeparablePower>(u);
}

double eval_utility(const UtilitySpec& u, const Vector& x) {
    check_bundle(as_span(x), goods_count(u));
    return std::visit(overloaded{
                          [&](const CobbDouglas& cd) {
                              return std::exp(cd.weights.dot(x.array().log().matrix()));
                          },
                          [&](const Ces& ces) {
                              const double s = ces.weights.dot(x.array().pow(ces.rho).matrix());
                              return std::pow(s, 1.0 / ces.rho);
                          },
                          [&](const SeparablePower& sp) {
                              double total = 0.0;
                              for (Eigen::Index j = 0; j < x.size(); ++j)
                                  total += sp.weights[j] * std::pow(x[j], sp.rhos[j]);
                              return total;
                          },
                      },
                      u);
}

Vector eval_gradient(const UtilitySpec& u, const Vector& x) {
    check_bundle(as_span(x), goods_count(u));
    return std::visit(overloaded{
                          [&](const CobbDouglas& cd) -> Vector {
                              const double value = std::exp(cd.weights.dot(x.array().log().matrix()));
                              return (cd.weights.array() * value / x.array()).matrix();
                          },
                          [&](const Ces& ces) -> Vector {
                              const double s = ces.weights.dot(x.array().pow(ces.rho).matrix());
                              // u^{1-rho} = s^{1/rho - 1}
                              const double scale = std::pow(s, 1.0 / ces.rho - 1.0);
                              return (scale * ces.weights.array() * x.array().pow(ces.rho - 1.0)).matrix();
                          },
                          [&](const SeparablePower& sp) -> Vector {
                              Vector g(x.size());
                              for (Eigen::Index j = 0; j < x.size(); ++j)
                                  g[j] = sp.weights[j] * sp.rhos[j] * std::pow(x[j], sp.rhos[j] - 1.0);
                              return g;
                          },
                      },
                      u);
}

void bid_shares_into(const UtilitySpec& u, std::span<const double> x, std::span<double> out) {
    const std::size_t m = goods_count(u);
    check_bundle(x, m);
    if (out.size() != m) throw Error(Errc::LengthMismatch, "share buffer has wrong length");

    // out_j holds x_j grad_j u(x) up to a factor common to all goods.
    std::visit(overloaded{
                   [&](const CobbDouglas& cd) {
                       for (std::size_t j = 0; j < m; ++j) out[j] = cd.weights[j];
                   },
                   [&](const Ces& ces) {
                       for (std::size_t j = 0; j < m; ++j) out[j] = ces.weights[j] * std::pow(x[j], ces.rho);
                   },
                   [&](const SeparablePower& sp) {
                       for (std::size_t j = 0; j < m; ++j)
                           out[j] = sp.weights[j] * sp.rhos[j] * std::pow(x[j], sp.rhos[j]);
                   },
               },
               u);

    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) total += out[j];
    for (std::size_t j = 0; j < m; ++j) out[j] /= total;
}

Vector bid_shares(const UtilitySpec& u, const Vector& x) {
    Vector out(x.size());
    bid_shares_into(u, as_span(x), {out.data(), static_cast<std::size_t>(out.size())});
    return out;
}

}  // namespace prd
