#pragma once

#include "slfv/ancestry.hpp"
#include "slfv/covering.hpp"
#include "slfv/dual.hpp"
#include "slfv/duality.hpp"
#include "slfv/errors.hpp"
#include "slfv/events.hpp"
#include "slfv/experiments.hpp"
#include "slfv/format.hpp"
#include "slfv/forward.hpp"
#include "slfv/geometry.hpp"
#include "slfv/point.hpp"
#include "slfv/radius_measure.hpp"
#include "slfv/rng.hpp"
#include "slfv/stats.hpp"
