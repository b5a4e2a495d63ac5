#pragma once

#include "devitensor/error.hpp"
#include "devitensor/tolerances.hpp"
#include "devitensor/tensor.hpp"
#include "devitensor/spectral.hpp"
#include "devitensor/harmonic.hpp"
#include "devitensor/polynomial.hpp"
#include "devitensor/multipole.hpp"
#include "devitensor/decomp2.hpp"
#include "devitensor/stiffness.hpp"
#include "devitensor/symmetry.hpp"
