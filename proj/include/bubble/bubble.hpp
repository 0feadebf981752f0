#pragma once

#include "bubble/error.hpp"
#include "bubble/params.hpp"
#include "bubble/quadrature.hpp"
#include "bubble/harmonics.hpp"
#include "bubble/shape_dynamics.hpp"
#include "bubble/radial_grid.hpp"
#include "bubble/radial_thermal.hpp"
#include "bubble/bessel.hpp"
#include "bubble/gas_interior.hpp"
#include "bubble/diagnostics.hpp"
#include "bubble/config.hpp"
#include "bubble/io.hpp"
#include "bubble/simulation.hpp"
