#pragma once

#include "fdstab/errors.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/grid.hpp"
#include "fdstab/stencil.hpp"
#include "fdstab/poly.hpp"
#include "fdstab/report.hpp"
#include "fdstab/symbol.hpp"
#include "fdstab/boundary_symbol.hpp"
#include "fdstab/validate.hpp"
#include "fdstab/scheme_io.hpp"
#include "fdstab/fourier.hpp"
#include "fdstab/energy.hpp"
#include "fdstab/sim.hpp"
#include "fdstab/registry.hpp"
#include "fdstab/experiments.hpp"
