#pragma once

#include "staircase/params.hpp"
#include "staircase/blend.hpp"
#include "staircase/geometry.hpp"
#include "staircase/landscape.hpp"
#include "staircase/verification.hpp"
#include "staircase/optimizer.hpp"
#include "staircase/analysis.hpp"
#include "staircase/io.hpp"
#include "staircase/experiment.hpp"
