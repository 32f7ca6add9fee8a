#pragma once

// Umbrella header.

#include "besselsg/error.hpp"
#include "besselsg/experiments.hpp"
#include "besselsg/grid_function.hpp"
#include "besselsg/io.hpp"
#include "besselsg/jacobi.hpp"
#include "besselsg/kernels.hpp"
#include "besselsg/measure.hpp"
#include "besselsg/norms.hpp"
#include "besselsg/oscvar.hpp"
#include "besselsg/quadrature.hpp"
#include "besselsg/semigroup.hpp"
#include "besselsg/spaces.hpp"
#include "besselsg/time_grid.hpp"
