#pragma once

#include "toposq/error.hpp"
#include "toposq/operator.hpp"
#include "toposq/context.hpp"
#include "toposq/bundle.hpp"
#include "toposq/frame.hpp"
#include "toposq/daseinisation.hpp"
#include "toposq/states.hpp"
#include "toposq/fixtures.hpp"
#include "toposq/random.hpp"
