#pragma once

#include "abme/core.hpp"
#include "abme/estimator.hpp"
#include "abme/metrics.hpp"
#include "abme/motion.hpp"
#include "abme/synthesis.hpp"
#include "abme/warp.hpp"
