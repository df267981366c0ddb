#pragma once

#include "protectosim/constants.hpp"
#include "protectosim/continuum.hpp"
#include "protectosim/ensemble.hpp"
#include "protectosim/errors.hpp"
#include "protectosim/exact.hpp"
#include "protectosim/figures.hpp"
#include "protectosim/geometry.hpp"
#include "protectosim/io/config.hpp"
#include "protectosim/io/csv.hpp"
#include "protectosim/io/curves.hpp"
#include "protectosim/io/svg.hpp"
#include "protectosim/mixture.hpp"
#include "protectosim/planner.hpp"
#include "protectosim/quadrature.hpp"
#include "protectosim/rng.hpp"
