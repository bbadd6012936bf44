#pragma once

#include "sndp/apsp.hpp"
#include "sndp/bits.hpp"
#include "sndp/congest.hpp"
#include "sndp/errors.hpp"
#include "sndp/graph.hpp"
#include "sndp/instance_io.hpp"
#include "sndp/mst_prune.hpp"
#include "sndp/node_state.hpp"
#include "sndp/oracle.hpp"
#include "sndp/solver.hpp"
#include "sndp/spf.hpp"
#include "sndp/triangles.hpp"
#include "sndp/tropical.hpp"
