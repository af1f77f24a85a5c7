#pragma once

// Umbrella header.

#include "czest/czono.hpp"
#include "czest/czono_json.hpp"
#include "czest/errors.hpp"
#include "czest/filters.hpp"
#include "czest/linalg.hpp"
#include "czest/lp.hpp"
#include "czest/scenario.hpp"
#include "czest/simharness.hpp"
#include "czest/sysmodel.hpp"
#include "czest/verify.hpp"
