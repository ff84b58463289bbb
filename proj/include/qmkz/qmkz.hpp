#pragma once

// Umbrella header.

#include "qmkz/approx_lab.hpp"
#include "qmkz/common.hpp"
#include "qmkz/functions.hpp"
#include "qmkz/operators.hpp"
#include "qmkz/qcalc.hpp"
#include "qmkz/summability.hpp"
