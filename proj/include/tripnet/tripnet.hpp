#pragma once

#include "tripnet/consistency.hpp"
#include "tripnet/core.hpp"
#include "tripnet/distance.hpp"
#include "tripnet/hbuild.hpp"
#include "tripnet/io.hpp"
#include "tripnet/ip_height.hpp"
#include "tripnet/network.hpp"
#include "tripnet/pair_graph.hpp"
#include "tripnet/reticulation.hpp"
#include "tripnet/sn_sets.hpp"
#include "tripnet/tree.hpp"
