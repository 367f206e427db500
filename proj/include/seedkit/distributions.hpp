#pragma once

namespace seedkit {

/// Regularized incomplete beta I_x(a, b), evaluated with the Lentz continued
/// fraction (using the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) for convergence).
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of the F distribution with (df1, df2) degrees of freedom.
double f_upper_tail(double f, double df1, double df2);

}  // namespace seedkit
