#pragma once

#include <vector>

namespace kronldp {

// ln E_u exp(t <u, diag(lambda) u>) for u uniform on the unit sphere of R^n (beta=1)
// or C^n (beta=2), n = lambda.size(). Exact positive series in the shifted spectrum
// lambda - min(lambda), summed with running rescaling.
double log_spherical_integral(const std::vector<double>& lambda, double t, int beta);

}  // namespace kronldp
