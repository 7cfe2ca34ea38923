#pragma once

#include "conetube/complex_jets.hpp"
#include "conetube/dehn_surgery.hpp"
#include "conetube/error.hpp"
#include "conetube/geometric_curve.hpp"
#include "conetube/gluing_variety.hpp"
#include "conetube/holonomy.hpp"
#include "conetube/mobius.hpp"
#include "conetube/polynomial_io.hpp"
#include "conetube/tube_geometry.hpp"
#include "conetube/verification.hpp"
