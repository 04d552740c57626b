#pragma once

#include "pic/image.hpp"
#include "pic/pnm.hpp"
#include "pic/noise.hpp"
#include "pic/solver.hpp"
#include "pic/mask.hpp"
#include "pic/encoders.hpp"
#include "pic/codec.hpp"
#include "pic/parallel.hpp"
#include "pic/bench.hpp"
#include "pic/bessel.hpp"
#include "pic/asymptotics.hpp"
