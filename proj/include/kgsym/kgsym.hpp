#pragma once

#include "kgsym/config.hpp"
#include "kgsym/diagnostics.hpp"
#include "kgsym/errors.hpp"
#include "kgsym/grid.hpp"
#include "kgsym/harness.hpp"
#include "kgsym/initial_data.hpp"
#include "kgsym/integrators.hpp"
#include "kgsym/nonlinearity.hpp"
#include "kgsym/propagators.hpp"
#include "kgsym/report.hpp"
#include "kgsym/snapshot.hpp"
#include "kgsym/version.hpp"
