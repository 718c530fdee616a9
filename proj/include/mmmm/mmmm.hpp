#pragma once

#include "mmmm/asymptotics.hpp"
#include "mmmm/exact_small.hpp"
#include "mmmm/experiments.hpp"
#include "mmmm/generator.hpp"
#include "mmmm/infinite_server.hpp"
#include "mmmm/ode_oracle.hpp"
#include "mmmm/series.hpp"
#include "mmmm/stationary.hpp"
#include "mmmm/system_params.hpp"
#include "mmmm/types.hpp"
