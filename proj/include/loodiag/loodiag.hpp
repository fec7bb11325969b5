#pragma once

// Leave-one-out influence diagnostics for linear regression: least-squares
// fitting, case-deletion statistics (Cook's distance, its spectral
// decomposition, the scalar K statistic), and distributional checks for the
// associated quadratic forms.

#include "data.hpp"
#include "deletion.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "regression.hpp"
#include "rng.hpp"
