#pragma once

#include "uncertainty/basis.hpp"
#include "uncertainty/bounds.hpp"
#include "uncertainty/constraints.hpp"
#include "uncertainty/io.hpp"
#include "uncertainty/optimizer.hpp"
#include "uncertainty/oracle.hpp"
#include "uncertainty/quadrature.hpp"
