#pragma once

#include "nlbox/anf.hpp"
#include "nlbox/bits.hpp"
#include "nlbox/box.hpp"
#include "nlbox/comm.hpp"
#include "nlbox/distill.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/localdist.hpp"
#include "nlbox/rational.hpp"
#include "nlbox/simplex.hpp"
#include "nlbox/union_find.hpp"
#include "nlbox/wiring.hpp"
