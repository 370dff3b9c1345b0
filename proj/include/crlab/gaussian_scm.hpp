#pragma once

#include <stdexcept>

namespace crlab {

// Coefficients and noise variances of the scalar Gaussian SCM
//   Z = eps_Z,  T_C = alpha*Z + eps_C,  T_nC = beta*Z + eps_N,
//   Y = rho*T_C + delta*Z + eps_Y,
// with mutually independent zero-mean Gaussian noise of the given variances.
// All information quantities derived from it are in nats.
struct GaussianScmParams {
    double alpha;
    double beta;
    double rho;
    double delta;
    double var_z;
    double var_c;
    double var_n;
    double var_y;

    GaussianScmParams(double alpha_, double beta_, double rho_, double delta_,
                      double var_z_, double var_c_, double var_n_, double var_y_)
        : alpha(alpha_), beta(beta_), rho(rho_), delta(delta_),
          var_z(var_z_), var_c(var_c_), var_n(var_n_), var_y(var_y_) {
        if (!(var_z > 0.0) || !(var_c > 0.0) || !(var_n > 0.0) || !(var_y > 0.0))
            throw std::invalid_argument("GaussianScmParams: all variances must be > 0");
    }

    static GaussianScmParams all_ones() {
        return GaussianScmParams(1, 1, 1, 1, 1, 1, 1, 1);
    }
};

// A candidate treatment representation evaluated under the criterion.
// Causal keeps T_C; Naive keeps (T_C, T_nC); CompressedCausal(v) is the
// stochastic channel G = T_C + eps_G with Var(eps_G) = v. Causal is the
// v = 0 special case of CompressedCausal.
struct RepresentationSpec {
    enum class Kind { Causal, Naive, CompressedCausal };

    Kind kind = Kind::Causal;
    double var_g = 0.0;

    static RepresentationSpec causal() { return {Kind::Causal, 0.0}; }
    static RepresentationSpec naive() { return {Kind::Naive, 0.0}; }
    static RepresentationSpec compressed(double var_g) {
        if (!(var_g >= 0.0))
            throw std::invalid_argument("RepresentationSpec: var_g must be >= 0");
        return {Kind::CompressedCausal, var_g};
    }
};

// I(T_C; Z) = 1/2 ln(1 + alpha^2 var_z / var_c)
double mi_tc_z(const GaussianScmParams& p);

// I(T_nC; Z | T_C) = 1/2 ln(1 + beta^2 var_z var_c / (var_n (alpha^2 var_z + var_c)))
double mi_tnc_z_given_tc(const GaussianScmParams& p);

// U(var_g) = I(G; Y | Z) for the compression channel; nonincreasing in var_g.
double utility(const GaussianScmParams& p, double var_g);

// P(var_g) = I(G; Z) = 1/2 ln(1 + alpha^2 var_z / (var_c + var_g)).
double penalty(const GaussianScmParams& p, double var_g);

// Utility/penalty of a representation (Naive pays the chain-rule penalty
// I(T_C;Z) + I(T_nC;Z|T_C) at equal utility).
double rep_utility(const GaussianScmParams& p, const RepresentationSpec& rep);
double rep_penalty(const GaussianScmParams& p, const RepresentationSpec& rep);

// J(rep) = utility - lambda * penalty.
double j_value(const GaussianScmParams& p, const RepresentationSpec& rep, double lambda);

// Bounded reparameterisation L_gamma = (1-gamma)*penalty - gamma*utility,
// minimised where J is maximised at lambda = 1/gamma - 1.
double l_gamma(const GaussianScmParams& p, const RepresentationSpec& rep, double gamma);

// Marginal utility loss over marginal penalty reduction at var_g = 0:
//   (rho^2 / (2 var_y)) / (alpha^2 var_z / (2 var_c (var_c + alpha^2 var_z))).
// Throws std::domain_error when alpha == 0 (no penalty to trade against);
// callers must handle the no-confounding case explicitly.
double lambda_crit(const GaussianScmParams& p);

double gamma_of_lambda(double lambda);   // 1/(1+lambda), lambda >= 0
double lambda_of_gamma(double gamma);    // inverse; gamma in (0,1]

}  // namespace crlab
