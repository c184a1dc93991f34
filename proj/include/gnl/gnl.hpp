#ifndef GNL_GNL_HPP
#define GNL_GNL_HPP

/// Umbrella header for the Gaussian Neumann eigenvalue laboratory.

#include "gnl/ball_spectrum.hpp"
#include "gnl/errors.hpp"
#include "gnl/fem2d.hpp"
#include "gnl/json_report.hpp"
#include "gnl/parallel.hpp"
#include "gnl/quadrature.hpp"
#include "gnl/radial_ode.hpp"
#include "gnl/verify.hpp"

#endif // GNL_GNL_HPP
