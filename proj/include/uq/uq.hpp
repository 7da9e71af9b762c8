// SPDX-License-Identifier: Apache-2.0
// Umbrella header.
#pragma once

#include "uq/bench.hpp"
#include "uq/builders.hpp"
#include "uq/circuit.hpp"
#include "uq/instance.hpp"
#include "uq/optimize.hpp"
#include "uq/seeding.hpp"
#include "uq/statevector.hpp"
#include "uq/version.hpp"
