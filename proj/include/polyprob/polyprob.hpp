#pragma once

// Gaussian probability content of polyhedra by holonomic continuation:
// build the face set of { x : a_j . x + b_j >= 0 }, assemble the Pfaffian
// operators of the parametric integral, and integrate the derivative vector
// along a homotopy from a start system with known values.  Monte Carlo and
// quadrature oracles are included for independent cross-checking.

#include "polyprob/errors.hpp"
#include "polyprob/subset.hpp"
#include "polyprob/halfspace_system.hpp"
#include "polyprob/families.hpp"
#include "polyprob/linprog.hpp"
#include "polyprob/face_complex.hpp"
#include "polyprob/inclusion_exclusion.hpp"
#include "polyprob/gram.hpp"
#include "polyprob/pfaffian.hpp"
#include "polyprob/hgm.hpp"
#include "polyprob/rng.hpp"
#include "polyprob/monte_carlo.hpp"
#include "polyprob/quadrature.hpp"
#include "polyprob/io.hpp"
#include "polyprob/checks.hpp"
