#pragma once

// Umbrella header for the cogmab library: a simulator and bound calculator
// for distributed learning and medium access over stochastically available
// channels.

#include "cogmab/absorption.hpp"
#include "cogmab/analysis.hpp"
#include "cogmab/belief.hpp"
#include "cogmab/channel.hpp"
#include "cogmab/csv.hpp"
#include "cogmab/figures.hpp"
#include "cogmab/ledger.hpp"
#include "cogmab/policies.hpp"
#include "cogmab/rng.hpp"
#include "cogmab/simulation.hpp"
