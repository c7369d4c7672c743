#ifndef SPHEREX_SPHEREX_HPP
#define SPHEREX_SPHEREX_HPP

#include "spherex/errors.hpp"
#include "spherex/functionals.hpp"
#include "spherex/galerkin.hpp"
#include "spherex/integrand.hpp"
#include "spherex/sampling.hpp"
#include "spherex/solvers.hpp"
#include "spherex/verify.hpp"

#endif  // SPHEREX_SPHEREX_HPP
