#pragma once

#include "glbreak/errors.hpp"
#include "glbreak/random.hpp"
#include "glbreak/model.hpp"
#include "glbreak/csv.hpp"
#include "glbreak/lrv.hpp"
#include "glbreak/supwald.hpp"
#include "glbreak/ls_engine.hpp"
#include "glbreak/loss.hpp"
#include "glbreak/limit_laws.hpp"
#include "glbreak/inference.hpp"
#include "glbreak/mc_harness.hpp"
#include "glbreak/json_io.hpp"
