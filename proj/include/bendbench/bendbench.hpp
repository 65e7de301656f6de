#pragma once

#include "bendbench/errors.hpp"
#include "bendbench/export.hpp"
#include "bendbench/harness.hpp"
#include "bendbench/objectives.hpp"
#include "bendbench/optim/cmaes.hpp"
#include "bendbench/optim/evaluator.hpp"
#include "bendbench/optim/pso.hpp"
#include "bendbench/optim/restart.hpp"
#include "bendbench/rng.hpp"
#include "bendbench/run_spec.hpp"
#include "bendbench/xform.hpp"
