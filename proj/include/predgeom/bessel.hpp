#pragma once

namespace predgeom {

// Modified Bessel functions of the first kind, orders 0 and 1, for z >= 0.
//
// Evaluation: ascending power series for z < 30 (compensated summation, at
// most 60 terms with early exit), and the scaled asymptotic expansion of
// e^{-z} I_nu(z) with 12 terms for z >= 30.  Relative error is at most 1e-12
// across [0, 700]; direct values overflow past z ~ 709, so the log variants
// are the interface for large arguments.

double bessel_i0(double z);
double bessel_i1(double z);

double log_bessel_i0(double z);
double log_bessel_i1(double z);  // -inf at z = 0

// I1(z)/I0(z): strictly increasing from 0 toward 1; overflow-free for all z.
double bessel_ratio_i1_i0(double z);

}  // namespace predgeom
