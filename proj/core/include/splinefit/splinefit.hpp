#pragma once

#include "splinefit/basis.hpp"
#include "splinefit/dataset.hpp"
#include "splinefit/error.hpp"
#include "splinefit/fit.hpp"
#include "splinefit/inference.hpp"
#include "splinefit/normal.hpp"
#include "splinefit/penalty.hpp"
#include "splinefit/random.hpp"
#include "splinefit/report.hpp"
#include "splinefit/selection.hpp"
#include "splinefit/serialize.hpp"
