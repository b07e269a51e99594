#pragma once

/// Umbrella header.

#include "scenerylab/cyclotomic.hpp"
#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/io.hpp"
#include "scenerylab/linalg.hpp"
#include "scenerylab/number.hpp"
#include "scenerylab/oracle.hpp"
#include "scenerylab/scenery.hpp"
#include "scenerylab/sim.hpp"
#include "scenerylab/spectral.hpp"
#include "scenerylab/walk.hpp"
