#pragma once

#include "ranksel/distributions.hpp"
#include "ranksel/efficiency.hpp"
#include "ranksel/errors.hpp"
#include "ranksel/extremes.hpp"
#include "ranksel/hconst.hpp"
#include "ranksel/parallel.hpp"
#include "ranksel/prior.hpp"
#include "ranksel/procedures.hpp"
#include "ranksel/quadrature.hpp"
#include "ranksel/rng.hpp"
#include "ranksel/roots.hpp"
#include "ranksel/schedule.hpp"
#include "ranksel/stats.hpp"
