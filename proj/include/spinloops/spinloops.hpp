#pragma once

#include "errors.hpp"
#include "evolution.hpp"
#include "fields.hpp"
#include "integrate.hpp"
#include "loops.hpp"
#include "scenario.hpp"
#include "spin.hpp"
#include "timefn.hpp"
