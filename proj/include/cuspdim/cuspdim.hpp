#pragma once

// Umbrella header.

#include "moebius.hpp"
#include "linalg.hpp"
#include "group.hpp"
#include "coding.hpp"
#include "transfer.hpp"
#include "dimension.hpp"
#include "gauss.hpp"
#include "diophantine.hpp"
#include "rng.hpp"
