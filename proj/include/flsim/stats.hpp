#pragma once

#include <vector>

namespace flsim::stats {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation. a, b > 0, x in [0, 1].
double incbeta(double a, double b, double x);

// Inverse of incbeta in x for fixed (a, b), solved by bisection.
double incbeta_inv(double a, double b, double p);

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

// Clopper-Pearson exact binomial confidence interval for k successes out of
// n trials: lower = BetaInv(alpha/2; k, n-k+1) with lower = 0 at k = 0,
// upper = BetaInv(1-alpha/2; k+1, n-k) with upper = 1 at k = n.
Interval clopper_pearson(int k, int n, double confidence);

// Gauss-Hermite rule for integrals of exp(-x^2) f(x) over the real line
// (physicists' convention). Nodes ascending, weights positive.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Quadrature gauss_hermite(int n);

double logit(double p);
double logistic(double x);

// Standard normal quantile (inverse CDF), rational approximation with one
// Halley refinement step; relative error well below 1e-12 on (0, 1).
double normal_quantile(double p);

}  // namespace flsim::stats
