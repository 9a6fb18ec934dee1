// Umbrella header for the speaker change-point detection library.
#pragma once

#include "scd/baselines.hpp"
#include "scd/common.hpp"
#include "scd/corpus.hpp"
#include "scd/embeddings.hpp"
#include "scd/eval.hpp"
#include "scd/features.hpp"
#include "scd/linalg.hpp"
#include "scd/nn.hpp"
#include "scd/segment.hpp"
#include "scd/split.hpp"
#include "scd/synth.hpp"
