#pragma once

#include "smperf/error.hpp"
#include "smperf/numerics.hpp"
#include "smperf/random.hpp"
#include "smperf/constellation.hpp"
#include "smperf/channel.hpp"
#include "smperf/transceiver.hpp"
#include "smperf/analysis.hpp"
#include "smperf/montecarlo.hpp"
#include "smperf/experiment.hpp"
