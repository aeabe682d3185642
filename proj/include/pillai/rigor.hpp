#pragma once

#include "pillai/rigor/ball.hpp"
#include "pillai/rigor/complex.hpp"
#include "pillai/rigor/policy.hpp"
