#ifndef XILAB_XILAB_HPP
#define XILAB_XILAB_HPP

#include "xilab/precision.hpp"
#include "xilab/complex.hpp"
#include "xilab/quadrature.hpp"
#include "xilab/special_functions.hpp"
#include "xilab/xi_core.hpp"
#include "xilab/xi_integrals.hpp"
#include "xilab/zero_lab.hpp"
#include "xilab/reference_data.hpp"

#endif  // XILAB_XILAB_HPP
