#ifndef FLOWAE_FLOWAE_HPP
#define FLOWAE_FLOWAE_HPP

#include "autoencoder.hpp"
#include "common.hpp"
#include "csv.hpp"
#include "detection.hpp"
#include "feature_encode.hpp"
#include "flow_extract.hpp"
#include "interpretation.hpp"
#include "persistence.hpp"
#include "synth_data.hpp"

#endif
