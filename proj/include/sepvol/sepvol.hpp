#pragma once

#include "sepvol/error.hpp"
#include "sepvol/scenario.hpp"
#include "sepvol/ppt.hpp"
#include "sepvol/rng.hpp"
#include "sepvol/measure.hpp"
#include "sepvol/special.hpp"
#include "sepvol/expr.hpp"
#include "sepvol/estimator.hpp"
#include "sepvol/closedforms.hpp"
#include "sepvol/catalog.hpp"
#include "sepvol/bounds.hpp"
#include "sepvol/report.hpp"
#include "sepvol/verify.hpp"
