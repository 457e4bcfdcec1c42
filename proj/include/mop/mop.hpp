#pragma once

// Multiple orthogonal polynomials on the step-line from discrete data:
// recurrence recovery (three routes), biorthogonal bases, diagnostics, and
// experiment harnesses over double, paired-double, and rational kinds.

#include "mop/coretrans.hpp"
#include "mop/diagnostics.hpp"
#include "mop/double_double.hpp"
#include "mop/errors.hpp"
#include "mop/experiments.hpp"
#include "mop/io.hpp"
#include "mop/krylov.hpp"
#include "mop/linalg.hpp"
#include "mop/model.hpp"
#include "mop/moments.hpp"
#include "mop/prng.hpp"
#include "mop/rational.hpp"
#include "mop/scalar.hpp"
