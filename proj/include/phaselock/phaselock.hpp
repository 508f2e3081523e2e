#pragma once

#include "phaselock/analytic.hpp"
#include "phaselock/continuation.hpp"
#include "phaselock/dynamics.hpp"
#include "phaselock/errors.hpp"
#include "phaselock/families.hpp"
#include "phaselock/g50.hpp"
#include "phaselock/graph.hpp"
#include "phaselock/io.hpp"
#include "phaselock/search.hpp"
