#pragma once

// Umbrella header: locality bounds for harmonic lattice dynamics.

#include "bounds.hpp"
#include "config.hpp"
#include "couplings.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "weyl.hpp"
