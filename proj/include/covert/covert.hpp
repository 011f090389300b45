#pragma once

// Umbrella header for the covert-link analysis library.

#include "covert/analytics.hpp"
#include "covert/detector.hpp"
#include "covert/errors.hpp"
#include "covert/experiment.hpp"
#include "covert/model.hpp"
#include "covert/optimizer.hpp"
#include "covert/rng.hpp"
#include "covert/search.hpp"
#include "covert/simulator.hpp"
