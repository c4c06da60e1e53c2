#pragma once

#include "sads_dirac/error.hpp"
#include "sads_dirac/spinor.hpp"
#include "sads_dirac/numerics.hpp"
#include "sads_dirac/geometry.hpp"
#include "sads_dirac/potentials.hpp"
#include "sads_dirac/ode.hpp"
#include "sads_dirac/grid.hpp"
#include "sads_dirac/jost.hpp"
#include "sads_dirac/boundary.hpp"
#include "sads_dirac/resolvent.hpp"
#include "sads_dirac/parallel.hpp"
#include "sads_dirac/resonance.hpp"
#include "sads_dirac/version.hpp"
