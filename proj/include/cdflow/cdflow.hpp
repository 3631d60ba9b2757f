#pragma once

#include "cdflow/cd_certifier.hpp"
#include "cdflow/constants.hpp"
#include "cdflow/discretization.hpp"
#include "cdflow/entropy_flow.hpp"
#include "cdflow/errors.hpp"
#include "cdflow/grid.hpp"
#include "cdflow/inequality_lab.hpp"
#include "cdflow/operator.hpp"
#include "cdflow/parallel.hpp"
#include "cdflow/polynomial.hpp"
#include "cdflow/random_fields.hpp"
#include "cdflow/report.hpp"
#include "cdflow/tridiagonal.hpp"
#include "cdflow/weights.hpp"
