#pragma once

// Umbrella header.

#include "mads/benchmark.hpp"
#include "mads/binio.hpp"
#include "mads/eigensolver.hpp"
#include "mads/embedding.hpp"
#include "mads/error.hpp"
#include "mads/evaluation.hpp"
#include "mads/facet.hpp"
#include "mads/matrix.hpp"
#include "mads/metadata.hpp"
#include "mads/metrics.hpp"
#include "mads/parallel.hpp"
#include "mads/projection.hpp"
#include "mads/rng.hpp"
#include "mads/stats.hpp"
#include "mads/store.hpp"
#include "mads/training.hpp"
