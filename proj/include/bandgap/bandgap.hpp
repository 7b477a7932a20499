#pragma once

#include "bandgap/analytic.hpp"
#include "bandgap/config.hpp"
#include "bandgap/error.hpp"
#include "bandgap/floquet.hpp"
#include "bandgap/geometry.hpp"
#include "bandgap/intervals.hpp"
#include "bandgap/io.hpp"
#include "bandgap/minmax.hpp"
#include "bandgap/reduction.hpp"
#include "bandgap/runner.hpp"
#include "bandgap/spectral.hpp"
