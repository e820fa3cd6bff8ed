#pragma once

// Umbrella header: the full simulation and analysis toolkit.

#include "netpoint/analysis.hpp"
#include "netpoint/cli.hpp"
#include "netpoint/controller.hpp"
#include "netpoint/errors.hpp"
#include "netpoint/estimator.hpp"
#include "netpoint/geometry.hpp"
#include "netpoint/io.hpp"
#include "netpoint/matrix.hpp"
#include "netpoint/scenario.hpp"
#include "netpoint/sim.hpp"
#include "netpoint/topology.hpp"
