#pragma once

#include <optional>

namespace enstat {

/// Tail probability together with the statistic and degrees of freedom it
/// came from. df2 is absent for t statistics.
struct PValue {
    double value = 1.0;
    double test_statistic = 0.0;
    double df1 = 0.0;
    std::optional<double> df2;
};

/// Natural log of the gamma function, x > 0.
double ln_gamma(double x);

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
/// Continued-fraction evaluation with the symmetry switch at
/// x > (a+1)/(a+b+2).
double reg_inc_beta(double a, double b, double x);

/// P(|T_df| >= |t|) for Student's t with df > 0 degrees of freedom.
PValue t_two_tailed_p(double t, double df);

/// P(F_{df1,df2} >= f) for the F distribution, f >= 0.
PValue f_upper_p(double f, double df1, double df2);

}  // namespace enstat
