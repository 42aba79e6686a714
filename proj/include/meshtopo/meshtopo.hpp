#pragma once

#include "meshtopo/deployment.hpp"
#include "meshtopo/geometry.hpp"
#include "meshtopo/interference.hpp"
#include "meshtopo/io.hpp"
#include "meshtopo/pipeline.hpp"
#include "meshtopo/pruning.hpp"
#include "meshtopo/rng.hpp"
#include "meshtopo/spatial_index.hpp"
#include "meshtopo/sweep.hpp"
#include "meshtopo/topology.hpp"
#include "meshtopo/traffic_sim.hpp"
#include "meshtopo/triangulation.hpp"
#include "meshtopo/voronoi.hpp"
