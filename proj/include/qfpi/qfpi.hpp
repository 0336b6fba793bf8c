#pragma once

// Convenience header for the numerical library (no I/O dependencies).

#include "qfpi/autocorrelation.hpp"
#include "qfpi/errors.hpp"
#include "qfpi/fluctuation.hpp"
#include "qfpi/fpi.hpp"
#include "qfpi/lorentz.hpp"
#include "qfpi/quadrature.hpp"
#include "qfpi/source.hpp"
