#pragma once

#include "etg/augment.hpp"
#include "etg/corpus.hpp"
#include "etg/dot.hpp"
#include "etg/embed.hpp"
#include "etg/error.hpp"
#include "etg/eval.hpp"
#include "etg/graph.hpp"
#include "etg/set_metrics.hpp"
#include "etg/spr.hpp"
