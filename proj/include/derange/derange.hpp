#pragma once

#include "evaluate.hpp"
#include "exp_poly.hpp"
#include "finite.hpp"
#include "limit.hpp"
#include "monte_carlo.hpp"
#include "partition.hpp"
#include "table.hpp"
