#pragma once

#include "moebius/blowup.hpp"
#include "moebius/config.hpp"
#include "moebius/curve.hpp"
#include "moebius/diagnostics.hpp"
#include "moebius/energy.hpp"
#include "moebius/flow.hpp"
#include "moebius/fourier.hpp"
#include "moebius/gradient.hpp"
#include "moebius/parallel.hpp"
#include "moebius/types.hpp"
#include "moebius/zoo.hpp"
