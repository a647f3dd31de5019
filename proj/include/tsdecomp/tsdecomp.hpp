#pragma once

// Umbrella header for the numerical modules. The pipeline (tsdecomp/pipeline.hpp)
// is kept separate because it needs nlohmann/json and OpenSSL.

#include "tsdecomp/detrend.hpp"
#include "tsdecomp/emd.hpp"
#include "tsdecomp/error.hpp"
#include "tsdecomp/ingest.hpp"
#include "tsdecomp/rng.hpp"
#include "tsdecomp/series.hpp"
#include "tsdecomp/spectral.hpp"
#include "tsdecomp/ssa.hpp"
#include "tsdecomp/stattests.hpp"
#include "tsdecomp/wavelet.hpp"
#include "tsdecomp/xwavelet.hpp"
