#pragma once

#include "matchgate/character.hpp"
#include "matchgate/io.hpp"
#include "matchgate/kasteleyn.hpp"
#include "matchgate/plane_graph.hpp"
#include "matchgate/rational.hpp"
#include "matchgate/realize.hpp"
#include "matchgate/signature.hpp"
#include "matchgate/skew.hpp"
#include "matchgate/symmetric.hpp"
