#pragma once

#include "sklimit/basis.hpp"
#include "sklimit/config.hpp"
#include "sklimit/errors.hpp"
#include "sklimit/estimators.hpp"
#include "sklimit/experiments.hpp"
#include "sklimit/heat.hpp"
#include "sklimit/kernels.hpp"
#include "sklimit/noise_feed.hpp"
#include "sklimit/nonlinearity.hpp"
#include "sklimit/parallel.hpp"
#include "sklimit/quadrature.hpp"
#include "sklimit/random.hpp"
#include "sklimit/stable.hpp"
#include "sklimit/trajectory.hpp"
#include "sklimit/wave.hpp"
