#pragma once

#include "ras/bf16.hpp"
#include "ras/container.hpp"
#include "ras/corpus.hpp"
#include "ras/errors.hpp"
#include "ras/probtab.hpp"
#include "ras/rans.hpp"
#include "ras/specdec.hpp"
#include "ras/wire.hpp"
