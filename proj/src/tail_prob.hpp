#pragma once

namespace dra {

// Upper-tail probabilities and quantiles for the inference tables.
// Self-contained series/continued-fraction implementations; exercised in
// the test suite against an independent high-precision oracle.

double reg_gamma_q(double a, double x);            // regularized upper incomplete gamma
double reg_inc_beta(double a, double b, double x); // regularized incomplete beta I_x(a,b)

double normal_upper_tail(double z);
double chisq_upper_tail(double x, double df);
double student_t_two_sided(double t, double df);
double f_upper_tail(double f, double df1, double df2);

double normal_quantile(double p);                  // inverse standard normal CDF
double student_t_quantile(double p, double df);    // inverse t CDF

}  // namespace dra
