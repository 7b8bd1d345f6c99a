#pragma once

#include "analytic.hpp"
#include "cli.hpp"
#include "martingale.hpp"
#include "moments.hpp"
#include "montecarlo.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "special.hpp"
#include "stats.hpp"
#include "walk.hpp"
