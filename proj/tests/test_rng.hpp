#pragma once

#include "splitmix.hpp"

namespace acclab::testing {

using Rng = SplitMix64;

} // namespace acclab::testing
