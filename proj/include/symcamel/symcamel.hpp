#pragma once

#include "symcamel/errors.hpp"
#include "symcamel/tolerances.hpp"
#include "symcamel/phasespace.hpp"
#include "symcamel/williamson.hpp"
#include "symcamel/camel.hpp"
#include "symcamel/hamiltonian.hpp"
#include "symcamel/orbit.hpp"
#include "symcamel/gaussian.hpp"
