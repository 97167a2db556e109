#pragma once

#include "medianosc/error.hpp"
#include "medianosc/grid.hpp"
#include "medianosc/median.hpp"
#include "medianosc/parallel.hpp"
#include "medianosc/sharp.hpp"
#include "medianosc/modulus.hpp"
#include "medianosc/decompose.hpp"
#include "medianosc/oscillation.hpp"
#include "medianosc/bmo.hpp"
#include "medianosc/corpus.hpp"
