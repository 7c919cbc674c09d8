#pragma once

#include "core.hpp"
#include "quadrature.hpp"
#include "theta.hpp"
#include "conformal.hpp"
#include "geometry.hpp"
#include "forms.hpp"
#include "kernels.hpp"
#include "report.hpp"
#include "operators.hpp"
#include "jump.hpp"
