#pragma once

#include "interphase/error.hpp"
#include "interphase/log.hpp"
#include "interphase/materials.hpp"
#include "interphase/equilibrium.hpp"
#include "interphase/functionals.hpp"
#include "interphase/chebyshev.hpp"
#include "interphase/radial_bvp.hpp"
#include "interphase/ntd.hpp"
#include "interphase/spectrum.hpp"
#include "interphase/evolution.hpp"
#include "interphase/csv.hpp"
#include "interphase/config.hpp"
