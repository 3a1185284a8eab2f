#pragma once

#include "odesa/checkpoint.hpp"
#include "odesa/encoders/grf.hpp"
#include "odesa/encoders/iris.hpp"
#include "odesa/encoders/morse.hpp"
#include "odesa/encoders/random_pattern.hpp"
#include "odesa/encoders/spike_csv.hpp"
#include "odesa/error.hpp"
#include "odesa/event.hpp"
#include "odesa/layer.hpp"
#include "odesa/network.hpp"
#include "odesa/time_surface.hpp"
