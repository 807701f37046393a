#pragma once

// Umbrella header.

#include "rational.hpp"
#include "arith.hpp"
#include "hermitian.hpp"
#include "residue.hpp"
#include "siegel.hpp"
#include "eisenstein.hpp"
#include "verify.hpp"
