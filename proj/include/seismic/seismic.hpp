#pragma once

#include "seismic/baselines.hpp"
#include "seismic/calibration.hpp"
#include "seismic/cascade.hpp"
#include "seismic/errors.hpp"
#include "seismic/estimator.hpp"
#include "seismic/evaluation.hpp"
#include "seismic/io.hpp"
#include "seismic/kernel.hpp"
#include "seismic/predictor.hpp"
#include "seismic/random.hpp"
#include "seismic/simulator.hpp"
