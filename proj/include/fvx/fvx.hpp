#pragma once

/// @file fvx.hpp
/// Umbrella header for the fvx library.

#include "fvx/rational.hpp"
#include "fvx/polynomial.hpp"
#include "fvx/forms.hpp"
#include "fvx/indexed_array.hpp"
#include "fvx/calculus.hpp"
#include "fvx/integration.hpp"
#include "fvx/metric_dual.hpp"
#include "fvx/lagrange.hpp"
#include "fvx/random.hpp"
#include "fvx/io.hpp"
#include "fvx/suites.hpp"
