#pragma once

#include "common.hpp"
#include "config.hpp"
#include "data.hpp"
#include "identify.hpp"
#include "invert.hpp"
#include "io.hpp"
#include "model.hpp"
#include "optim.hpp"
#include "poly.hpp"
#include "sim.hpp"
#include "validate.hpp"
