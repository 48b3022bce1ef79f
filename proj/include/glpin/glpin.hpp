#pragma once

//! Umbrella header.
#include "acceptance.hpp"
#include "connection.hpp"
#include "core.hpp"
#include "energy.hpp"
#include "geometry.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "metric.hpp"
#include "profile.hpp"
#include "structure.hpp"
