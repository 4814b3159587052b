#pragma once

// Everything except the network server, which pulls in Boost.Beast.

#include "hapticopter/gateway/protocol.hpp"
#include "hapticopter/gateway/record.hpp"
#include "hapticopter/gateway/session.hpp"
#include "hapticopter/harness.hpp"
#include "hapticopter/haptics.hpp"
#include "hapticopter/loop.hpp"
#include "hapticopter/metrics.hpp"
#include "hapticopter/pilot.hpp"
#include "hapticopter/results.hpp"
#include "hapticopter/scenario.hpp"
#include "hapticopter/sensing.hpp"
#include "hapticopter/sim.hpp"
#include "hapticopter/special_functions.hpp"
#include "hapticopter/stats.hpp"
#include "hapticopter/teleop.hpp"
#include "hapticopter/trial_log.hpp"
#include "hapticopter/vec3.hpp"
#include "hapticopter/world.hpp"
