#pragma once

#include "octodyson/charpoly_calculus.hpp"
#include "octodyson/dyson_sim.hpp"
#include "octodyson/errors.hpp"
#include "octodyson/identity_report.hpp"
#include "octodyson/octo_matrix.hpp"
#include "octodyson/octonion.hpp"
#include "octodyson/reporting.hpp"
#include "octodyson/rng.hpp"
#include "octodyson/version.hpp"
