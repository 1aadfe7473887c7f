#pragma once

#include "hyperfit/data.hpp"
#include "hyperfit/error.hpp"
#include "hyperfit/geometry.hpp"
#include "hyperfit/init.hpp"
#include "hyperfit/manifold.hpp"
#include "hyperfit/metrics.hpp"
#include "hyperfit/parallel.hpp"
#include "hyperfit/random.hpp"
#include "hyperfit/select.hpp"
#include "hyperfit/solver.hpp"
