#pragma once

#include "nblod/dataset.hpp"
#include "nblod/harness.hpp"
#include "nblod/method_tag.hpp"
#include "nblod/metrics.hpp"
#include "nblod/neighbors.hpp"
#include "nblod/scoring.hpp"
#include "nblod/space.hpp"
