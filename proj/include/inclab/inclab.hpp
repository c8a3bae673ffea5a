#pragma once

#include "inclab/agents.hpp"
#include "inclab/analysis.hpp"
#include "inclab/calibration.hpp"
#include "inclab/config.hpp"
#include "inclab/decision_model.hpp"
#include "inclab/distributions.hpp"
#include "inclab/error.hpp"
#include "inclab/experiment.hpp"
#include "inclab/mediation.hpp"
#include "inclab/ols.hpp"
#include "inclab/random.hpp"
#include "inclab/records.hpp"
#include "inclab/session.hpp"
#include "inclab/special_functions.hpp"
#include "inclab/stats.hpp"
#include "inclab/task_bank.hpp"
