#pragma once

#include "etfad/assign.hpp"
#include "etfad/errors.hpp"
#include "etfad/expr.hpp"
#include "etfad/fad.hpp"
#include "etfad/instrument.hpp"
#include "etfad/ops.hpp"
#include "etfad/strategy.hpp"
