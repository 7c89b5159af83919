#pragma once

// Imitation from observation under an interaction budget: environments,
// inverse-dynamics models, behavioral cloning, the budgeted improvement
// loop, and the experiment harness around them.

#include "bco/adam.hpp"
#include "bco/bc.hpp"
#include "bco/config.hpp"
#include "bco/csv.hpp"
#include "bco/demos.hpp"
#include "bco/driver.hpp"
#include "bco/env.hpp"
#include "bco/environments.hpp"
#include "bco/errors.hpp"
#include "bco/harness.hpp"
#include "bco/inverse_dynamics.hpp"
#include "bco/losses.hpp"
#include "bco/matrix.hpp"
#include "bco/mlp.hpp"
#include "bco/model.hpp"
#include "bco/policy.hpp"
#include "bco/rng.hpp"
#include "bco/serialize.hpp"
#include "bco/training.hpp"
