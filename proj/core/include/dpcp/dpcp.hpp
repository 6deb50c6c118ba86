#pragma once

#include "dpcp/analysis.hpp"
#include "dpcp/continuous.hpp"
#include "dpcp/dataset.hpp"
#include "dpcp/error.hpp"
#include "dpcp/geometry.hpp"
#include "dpcp/harness.hpp"
#include "dpcp/random.hpp"
#include "dpcp/rsgm.hpp"
#include "dpcp/solver.hpp"
#include "dpcp/trace.hpp"
