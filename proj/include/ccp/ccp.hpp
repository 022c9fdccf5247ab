#pragma once

// Umbrella header for the chance-constrained programming toolkit.

#include "ccp/benchmarks.hpp"
#include "ccp/bundle.hpp"
#include "ccp/config.hpp"
#include "ccp/csv.hpp"
#include "ccp/empirical.hpp"
#include "ccp/gamma.hpp"
#include "ccp/penalty.hpp"
#include "ccp/problem.hpp"
#include "ccp/rng.hpp"
#include "ccp/scenarios.hpp"
#include "ccp/solver.hpp"
#include "ccp/types.hpp"
#include "ccp/verify.hpp"
