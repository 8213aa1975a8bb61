#pragma once

#include "glucam/clinical.hpp"
#include "glucam/config.hpp"
#include "glucam/core.hpp"
#include "glucam/features.hpp"
#include "glucam/fft.hpp"
#include "glucam/ingest.hpp"
#include "glucam/io.hpp"
#include "glucam/preprocess.hpp"
#include "glucam/regression.hpp"
#include "glucam/rng.hpp"
#include "glucam/svg.hpp"
#include "glucam/synth.hpp"
