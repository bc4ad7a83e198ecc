#pragma once

namespace hoqtt {

// Bessel function of the first kind, integer order nu >= 0, |x| <= 1e6.
// Power series for |x| <= nu+2, Miller downward recurrence otherwise.
double bessel_j(int nu, double x);

// Gamma function for x > 0 (Lanczos approximation).
double gamma_fn(double x);

}  // namespace hoqtt
