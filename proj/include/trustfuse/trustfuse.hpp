#pragma once

#include "trustfuse/assignment.hpp"
#include "trustfuse/fov.hpp"
#include "trustfuse/geometry.hpp"
#include "trustfuse/harness.hpp"
#include "trustfuse/metrics.hpp"
#include "trustfuse/scenarios.hpp"
#include "trustfuse/threat.hpp"
#include "trustfuse/tracking.hpp"
#include "trustfuse/trust.hpp"
#include "trustfuse/trust_distribution.hpp"
#include "trustfuse/world.hpp"
