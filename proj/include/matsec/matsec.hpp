#pragma once

// Umbrella header for the whole library.

#include "matsec/analysis.hpp"
#include "matsec/audit.hpp"
#include "matsec/core.hpp"
#include "matsec/exhaustive.hpp"
#include "matsec/experiment.hpp"
#include "matsec/instance_io.hpp"
#include "matsec/matroid.hpp"
#include "matsec/minor.hpp"
#include "matsec/rng.hpp"
#include "matsec/secretary.hpp"
#include "matsec/verify.hpp"
#include "matsec/weight_classes.hpp"
#include "matsec/weights.hpp"
