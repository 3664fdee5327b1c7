#pragma once

namespace gspf {

/// Regularized incomplete beta function I_x(a,b), a,b > 0, x in [0,1].
/// Continued-fraction evaluation, relative accuracy ~1e-14.
double incomplete_beta(double a, double b, double x);

/// Upper-tail probability P(F > f) of the central F distribution with
/// df1, df2 > 0 degrees of freedom.
double f_upper_tail(double f, double df1, double df2);

}  // namespace gspf
