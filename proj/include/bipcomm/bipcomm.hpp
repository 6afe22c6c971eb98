#pragma once

// Umbrella header: every module of the library.

#include <bipcomm/brim.hpp>
#include <bipcomm/csv.hpp>
#include <bipcomm/enrichment.hpp>
#include <bipcomm/errors.hpp>
#include <bipcomm/graph.hpp>
#include <bipcomm/metrics.hpp>
#include <bipcomm/parallel.hpp>
#include <bipcomm/partition.hpp>
#include <bipcomm/pipeline.hpp>
#include <bipcomm/random.hpp>
#include <bipcomm/stats.hpp>
#include <bipcomm/synth.hpp>
#include <bipcomm/tracker.hpp>
