#pragma once

#include "thh/arith.hpp"
#include "thh/brun.hpp"
#include "thh/catalog.hpp"
#include "thh/chart.hpp"
#include "thh/graded.hpp"
#include "thh/parallel.hpp"
#include "thh/serialize.hpp"
#include "thh/verify.hpp"
