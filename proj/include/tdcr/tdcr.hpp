#pragma once

// Tendon-driven continuum robot dynamics, shooting solver, tip controllers,
// and the scenario/metrics harness.

#include "tdcr/config.hpp"
#include "tdcr/control.hpp"
#include "tdcr/dynamics.hpp"
#include "tdcr/errors.hpp"
#include "tdcr/math.hpp"
#include "tdcr/rod.hpp"
#include "tdcr/scenario.hpp"
#include "tdcr/shooting.hpp"
#include "tdcr/svg.hpp"
#include "tdcr/tendon_loads.hpp"
#include "tdcr/trace_io.hpp"
