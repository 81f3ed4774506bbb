#pragma once

#include "ladderlab/arithmetic.hpp"
#include "ladderlab/chebyshev.hpp"
#include "ladderlab/constants.hpp"
#include "ladderlab/cumulative_table.hpp"
#include "ladderlab/errors.hpp"
#include "ladderlab/experiments.hpp"
#include "ladderlab/gsets.hpp"
#include "ladderlab/interval_union.hpp"
#include "ladderlab/ladder.hpp"
#include "ladderlab/quadrature.hpp"
#include "ladderlab/report.hpp"
#include "ladderlab/riemann_siegel_coeffs.hpp"
#include "ladderlab/summation.hpp"
#include "ladderlab/zeta.hpp"
