#pragma once

#include "deltavpr/calibration.hpp"
#include "deltavpr/error.hpp"
#include "deltavpr/evaluation.hpp"
#include "deltavpr/io.hpp"
#include "deltavpr/matching.hpp"
#include "deltavpr/pipeline.hpp"
#include "deltavpr/reduction.hpp"
#include "deltavpr/series.hpp"
#include "deltavpr/synth.hpp"
#include "deltavpr/transform.hpp"
