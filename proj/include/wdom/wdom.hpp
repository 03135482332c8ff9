#pragma once

#include "wdom/coloring.hpp"
#include "wdom/error.hpp"
#include "wdom/generators.hpp"
#include "wdom/graph.hpp"
#include "wdom/lmax_dp.hpp"
#include "wdom/nice_decomposition.hpp"
#include "wdom/oracle.hpp"
#include "wdom/subset_convolution.hpp"
#include "wdom/tree_decomposition.hpp"
#include "wdom/validation.hpp"
#include "wdom/value.hpp"
#include "wdom/wds_dp.hpp"
