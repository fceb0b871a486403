#pragma once

#include "pcr/benchmark.hpp"
#include "pcr/dataset.hpp"
#include "pcr/embedding.hpp"
#include "pcr/error.hpp"
#include "pcr/generator.hpp"
#include "pcr/graph.hpp"
#include "pcr/lexical.hpp"
#include "pcr/metrics.hpp"
#include "pcr/retrieval.hpp"
#include "pcr/stats.hpp"
