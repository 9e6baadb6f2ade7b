#pragma once

#include "coppit/calibration.hpp"
#include "coppit/copula.hpp"
#include "coppit/error.hpp"
#include "coppit/forecast.hpp"
#include "coppit/io.hpp"
#include "coppit/kendall.hpp"
#include "coppit/parallel.hpp"
#include "coppit/rng.hpp"
#include "coppit/samplers.hpp"
#include "coppit/simstudy.hpp"
#include "coppit/special.hpp"
#include "coppit/stats.hpp"

namespace coppit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coppit
