#pragma once

// Umbrella header for the GLA anomaly-detection toolkit.

#include "gla/errors.hpp"
#include "gla/events.hpp"
#include "gla/gauge.hpp"
#include "gla/hdbscan.hpp"
#include "gla/hmm.hpp"
#include "gla/matrix.hpp"
#include "gla/metrics.hpp"
#include "gla/pipeline.hpp"
#include "gla/random.hpp"
#include "gla/report.hpp"
#include "gla/synth.hpp"
#include "gla/tsne.hpp"
