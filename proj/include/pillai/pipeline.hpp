#pragma once

#include "pillai/pipeline/chain.hpp"
#include "pillai/pipeline/config.hpp"
#include "pillai/pipeline/context.hpp"
#include "pillai/pipeline/run.hpp"
#include "pillai/pipeline/verify.hpp"
#include "pillai/search_io.hpp"
