#pragma once

#include "centerbias/analysis.hpp"
#include "centerbias/coeffs.hpp"
#include "centerbias/config.hpp"
#include "centerbias/elliptic.hpp"
#include "centerbias/error.hpp"
#include "centerbias/experiments.hpp"
#include "centerbias/lvalues.hpp"
#include "centerbias/primes.hpp"
#include "centerbias/series.hpp"
#include "centerbias/summation.hpp"
#include "centerbias/table.hpp"
#include "centerbias/tau.hpp"
#include "centerbias/zeros.hpp"
