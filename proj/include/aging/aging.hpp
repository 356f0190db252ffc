#pragma once

#include "aging/config.hpp"
#include "aging/csv.hpp"
#include "aging/forecast.hpp"
#include "aging/metrics.hpp"
#include "aging/mlp.hpp"
#include "aging/pipeline.hpp"
#include "aging/preprocess.hpp"
#include "aging/rng.hpp"
#include "aging/synthgen.hpp"
#include "aging/timeseries.hpp"
#include "aging/tuner.hpp"
