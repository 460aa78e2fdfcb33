#pragma once

#include "vhfix/comparison.hpp"
#include "vhfix/config.hpp"
#include "vhfix/expr.hpp"
#include "vhfix/grid.hpp"
#include "vhfix/mnc.hpp"
#include "vhfix/numfmt.hpp"
#include "vhfix/problem.hpp"
#include "vhfix/quadrature.hpp"
#include "vhfix/report.hpp"
#include "vhfix/sampling.hpp"
#include "vhfix/solver.hpp"
