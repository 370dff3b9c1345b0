#include "crlab/gaussian_scm.hpp"

#include <cmath>

namespace crlab {

double mi_tc_z(const GaussianScmParams& p) {
    return 0.5 * std::log1p(p.alpha * p.alpha * p.var_z / p.var_c);
}

double mi_tnc_z_given_tc(const GaussianScmParams& p) {
    const double num = p.beta * p.beta * p.var_z * p.var_c;
    const double den = p.var_n * (p.alpha * p.alpha * p.var_z + p.var_c);
    return 0.5 * std::log1p(num / den);
}

double utility(const GaussianScmParams& p, double var_g) {
    if (!(var_g >= 0.0)) throw std::invalid_argument("utility: var_g must be >= 0");
    const double var_y_given_z = p.rho * p.rho * p.var_c + p.var_y;
    const double explained = p.rho * p.rho * p.var_c * p.var_c / (p.var_c + var_g);
    return 0.5 * std::log(var_y_given_z / (var_y_given_z - explained));
}

double penalty(const GaussianScmParams& p, double var_g) {
    if (!(var_g >= 0.0)) throw std::invalid_argument("penalty: var_g must be >= 0");
    return 0.5 * std::log1p(p.alpha * p.alpha * p.var_z / (p.var_c + var_g));
}

double rep_utility(const GaussianScmParams& p, const RepresentationSpec& rep) {
    switch (rep.kind) {
        case RepresentationSpec::Kind::Causal:
            return utility(p, 0.0);
        case RepresentationSpec::Kind::Naive:
            // Equal to the causal utility: T_nC adds nothing given (T_C, Z).
            return utility(p, 0.0);
        case RepresentationSpec::Kind::CompressedCausal:
            return utility(p, rep.var_g);
    }
    throw std::logic_error("rep_utility: unreachable");
}

double rep_penalty(const GaussianScmParams& p, const RepresentationSpec& rep) {
    switch (rep.kind) {
        case RepresentationSpec::Kind::Causal:
            return penalty(p, 0.0);
        case RepresentationSpec::Kind::Naive:
            // Chain rule: I((T_C,T_nC);Z) = I(T_C;Z) + I(T_nC;Z|T_C).
            return mi_tc_z(p) + mi_tnc_z_given_tc(p);
        case RepresentationSpec::Kind::CompressedCausal:
            return penalty(p, rep.var_g);
    }
    throw std::logic_error("rep_penalty: unreachable");
}

double j_value(const GaussianScmParams& p, const RepresentationSpec& rep, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("j_value: lambda must be >= 0");
    return rep_utility(p, rep) - lambda * rep_penalty(p, rep);
}

double l_gamma(const GaussianScmParams& p, const RepresentationSpec& rep, double gamma) {
    if (!(gamma > 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("l_gamma: gamma must be in (0,1]");
    return (1.0 - gamma) * rep_penalty(p, rep) - gamma * rep_utility(p, rep);
}

double lambda_crit(const GaussianScmParams& p) {
    if (p.alpha == 0.0)
        throw std::domain_error(
            "lambda_crit: alpha == 0 gives zero marginal penalty reduction");
    const double utility_slope = p.rho * p.rho / (2.0 * p.var_y);
    const double penalty_slope = p.alpha * p.alpha * p.var_z /
                                 (2.0 * p.var_c * (p.var_c + p.alpha * p.alpha * p.var_z));
    return utility_slope / penalty_slope;
}

double gamma_of_lambda(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("gamma_of_lambda: lambda must be >= 0");
    return 1.0 / (1.0 + lambda);
}

double lambda_of_gamma(double gamma) {
    if (!(gamma > 0.0) || !(gamma <= 1.0))
        throw std::invalid_argument("lambda_of_gamma: gamma must be in (0,1]");
    return (1.0 - gamma) / gamma;
}

}  // namespace crlab
