#pragma once

// Umbrella header for the whole library.

#include "rcnet/errors.hpp"
#include "rcnet/edge_set.hpp"
#include "rcnet/network.hpp"
#include "rcnet/panel.hpp"
#include "rcnet/noise.hpp"
#include "rcnet/simulate.hpp"
#include "rcnet/solver.hpp"
#include "rcnet/wiener.hpp"
#include "rcnet/oracle.hpp"
#include "rcnet/topology.hpp"
#include "rcnet/baselines.hpp"
#include "rcnet/io.hpp"
#include "rcnet/experiment.hpp"
