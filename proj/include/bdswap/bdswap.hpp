#pragma once

#include "bench.hpp"
#include "chain.hpp"
#include "configuration.hpp"
#include "dcftp.hpp"
#include "dominating.hpp"
#include "event_log_io.hpp"
#include "model_io.hpp"
#include "models.hpp"
#include "random.hpp"
#include "space.hpp"
#include "stats.hpp"
#include "validation.hpp"
