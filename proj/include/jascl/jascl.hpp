#pragma once

#include "jascl/bench/dataset.hpp"
#include "jascl/bench/io.hpp"
#include "jascl/bench/metrics.hpp"
#include "jascl/bench/model.hpp"
#include "jascl/bench/protocol.hpp"
#include "jascl/bench/runner.hpp"
#include "jascl/bench/trainer.hpp"
#include "jascl/common.hpp"
#include "jascl/dynamics.hpp"
#include "jascl/gas.hpp"
#include "jascl/json_io.hpp"
#include "jascl/numerics.hpp"
#include "jascl/pas.hpp"
#include "jascl/rng.hpp"
