#pragma once

#include "tube/bridge.hpp"
#include "tube/config.hpp"
#include "tube/generator.hpp"
#include "tube/measures.hpp"
#include "tube/parallel.hpp"
#include "tube/partitions.hpp"
#include "tube/records.hpp"
#include "tube/rng.hpp"
#include "tube/simulate.hpp"
#include "tube/solver.hpp"
#include "tube/space_cache.hpp"
#include "tube/stat_tests.hpp"
#include "tube/state_space.hpp"
#include "tube/trajectory.hpp"
