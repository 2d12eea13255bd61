#pragma once

#include "lsmrl/agent.hpp"
#include "lsmrl/config.hpp"
#include "lsmrl/diagnostics.hpp"
#include "lsmrl/eigen_solver.hpp"
#include "lsmrl/encoding.hpp"
#include "lsmrl/envs/cartpole.hpp"
#include "lsmrl/envs/environment.hpp"
#include "lsmrl/envs/pacman.hpp"
#include "lsmrl/experiment.hpp"
#include "lsmrl/metrics.hpp"
#include "lsmrl/model_io.hpp"
#include "lsmrl/readout.hpp"
#include "lsmrl/reservoir.hpp"
#include "lsmrl/rng.hpp"
#include "lsmrl/sparse.hpp"
