#pragma once

#include "core.hpp"
#include "algebra.hpp"
#include "endo.hpp"
#include "matcalc.hpp"
#include "reps.hpp"
#include "norms.hpp"
#include "reduction.hpp"
#include "canonical.hpp"
#include "io.hpp"
