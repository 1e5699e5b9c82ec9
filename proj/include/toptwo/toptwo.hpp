#pragma once

#include "toptwo/asymptotics.hpp"
#include "toptwo/bias.hpp"
#include "toptwo/blocks.hpp"
#include "toptwo/bootstrap.hpp"
#include "toptwo/brent.hpp"
#include "toptwo/csv.hpp"
#include "toptwo/errors.hpp"
#include "toptwo/fw.hpp"
#include "toptwo/harness.hpp"
#include "toptwo/mle.hpp"
#include "toptwo/models.hpp"
#include "toptwo/returns.hpp"
#include "toptwo/rho.hpp"
#include "toptwo/rng.hpp"
#include "toptwo/special.hpp"
