#pragma once

#include "meandim/error.hpp"
#include "meandim/rational.hpp"
#include "meandim/rng.hpp"
#include "meandim/params.hpp"
#include "meandim/symbolic.hpp"
#include "meandim/skew.hpp"
#include "meandim/kernel.hpp"
#include "meandim/synthesis.hpp"
#include "meandim/mdim.hpp"
#include "meandim/spectral.hpp"
#include "meandim/io.hpp"
#include "meandim/pipeline.hpp"
