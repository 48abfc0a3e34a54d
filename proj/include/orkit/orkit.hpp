#pragma once

#include "errors.hpp"
#include "rational.hpp"
#include "matrix.hpp"
#include "xspace.hpp"
#include "dkstp.hpp"
#include "subspace.hpp"
#include "orsys.hpp"
#include "sim.hpp"
#include "poly.hpp"
#include "nonlin.hpp"
#include "io.hpp"
#include "repro.hpp"
