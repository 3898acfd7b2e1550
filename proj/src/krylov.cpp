#include "gauduchon/krylov.hpp"

#include <cmath>
#include <vector>

namespace gauduchon::krylov {

GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, const Vector& b,
                  const GmresOptions& opts) {
    const Eigen::Index size = b.size();
    GmresResult out;
    out.x = Vector::Zero(size);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    const int m = std::max(1, opts.restart);

    std::vector<Vector> basis(static_cast<std::size_t>(m + 1));
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Vector cs(m), sn(m), g(m + 1);
    Vector r(size), w(size), z(size);

    while (out.iterations < opts.max_iterations) {
        apply(out.x, w);
        r = b - w;
        double beta = r.norm();
        out.relative_residual = beta / bnorm;
        if (out.relative_residual <= opts.tol) {
            out.converged = true;
            return out;
        }
        basis[0] = r / beta;
        g.setZero();
        g(0) = beta;
        H.setZero();

        int j = 0;
        for (; j < m && out.iterations < opts.max_iterations; ++j) {
            ++out.iterations;
            precondition(basis[static_cast<std::size_t>(j)], z);
            apply(z, w);
            // Modified Gram-Schmidt.
            for (int i = 0; i <= j; ++i) {
                H(i, j) = w.dot(basis[static_cast<std::size_t>(i)]);
                w -= H(i, j) * basis[static_cast<std::size_t>(i)];
            }
            H(j + 1, j) = w.norm();
            if (H(j + 1, j) > 0.0) basis[static_cast<std::size_t>(j + 1)] = w / H(j + 1, j);

            for (int i = 0; i < j; ++i) {
                const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
                H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
                H(i, j) = t;
            }
            const double denom = std::hypot(H(j, j), H(j + 1, j));
            cs(j) = denom == 0.0 ? 1.0 : H(j, j) / denom;
            sn(j) = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
            if (denom == 0.0) break;  // singular direction; leave it out of the update
            H(j, j) = denom;
            H(j + 1, j) = 0.0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = cs(j) * g(j);

            out.relative_residual = std::abs(g(j + 1)) / bnorm;
            if (out.relative_residual <= opts.tol) {
                ++j;
                break;
            }
        }

        // Back substitution on the leading j×j triangle, then x += M^{-1} V y.
        if (j == 0) break;
        Vector y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
        w.setZero();
        for (int i = 0; i < j; ++i) w += y(i) * basis[static_cast<std::size_t>(i)];
        precondition(w, z);
        out.x += z;
    }

    apply(out.x, w);
    out.relative_residual = (b - w).norm() / bnorm;
    out.converged = out.relative_residual <= opts.tol;
    return out;
}

}  // namespace gauduchon::krylov
