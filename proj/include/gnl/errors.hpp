#ifndef GNL_ERRORS_HPP
#define GNL_ERRORS_HPP

#include <stdexcept>

namespace gnl {

/// Non-finite integrand value at a quadrature node.
struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical solver failure (integration breakdown, non-convergence, ...).
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Eigenvalue completeness check failed even after automatic bracket halving.
struct rescan_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct mesh_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct assembly_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point lookup outside the meshed region.
struct location_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gnl

#endif // GNL_ERRORS_HPP
