#pragma once

// Restarted GMRES with right preconditioning.

#include <functional>

#include <Eigen/Dense>

namespace gauduchon::krylov {

using Vector = Eigen::VectorXd;
// y = A x. `y` arrives sized like `x`.
using LinearMap = std::function<void(const Vector& x, Vector& y)>;

struct GmresOptions {
    double tol = 1e-12;  // on ||b - A x|| / ||b||
    int restart = 30;
    int max_iterations = 2000;
};

struct GmresResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// Solves A x = b starting from x = 0; `precondition` applies an approximate inverse of A.
GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, const Vector& b,
                  const GmresOptions& opts);

}  // namespace gauduchon::krylov
