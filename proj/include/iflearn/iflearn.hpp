#pragma once

#include "iflearn/crossfit.hpp"
#include "iflearn/csv.hpp"
#include "iflearn/data.hpp"
#include "iflearn/error.hpp"
#include "iflearn/grouplearner.hpp"
#include "iflearn/iflearner.hpp"
#include "iflearn/learners.hpp"
#include "iflearn/parallel.hpp"
#include "iflearn/pseudo.hpp"
#include "iflearn/rng.hpp"
#include "iflearn/serialize.hpp"
#include "iflearn/simulate.hpp"
