#pragma once

#include "gcb/analysis.hpp"
#include "gcb/errors.hpp"
#include "gcb/events.hpp"
#include "gcb/node.hpp"
#include "gcb/params.hpp"
#include "gcb/rebalance.hpp"
#include "gcb/tree.hpp"
