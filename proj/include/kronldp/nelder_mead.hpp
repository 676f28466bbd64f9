#pragma once

#include <functional>
#include <vector>

namespace kronldp {

struct NelderMeadOptions {
    double initial_step = 0.25;
    double f_tol = 1e-10;
    double x_tol = 1e-9;
    int max_evals = 4000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evals = 0;
    bool converged = false;
};

// Derivative-free simplex minimization with one restart from the best vertex.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opt = {});

}  // namespace kronldp
