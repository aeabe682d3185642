#pragma once

#include "pillai/cfrac.hpp"
#include "pillai/error.hpp"
#include "pillai/heights.hpp"
#include "pillai/pipeline.hpp"
#include "pillai/rigor.hpp"
#include "pillai/search.hpp"
#include "pillai/sequence.hpp"
