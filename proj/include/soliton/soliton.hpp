#pragma once

#include "soliton/errors.hpp"
#include "soliton/nonlinearity.hpp"
#include "soliton/operator_matrix.hpp"
#include "soliton/grid.hpp"
#include "soliton/profiles.hpp"
#include "soliton/operators.hpp"
#include "soliton/spectra.hpp"
#include "soliton/stability.hpp"
#include "soliton/derrick.hpp"
#include "soliton/io.hpp"
#include "soliton/config.hpp"
#include "soliton/run.hpp"
