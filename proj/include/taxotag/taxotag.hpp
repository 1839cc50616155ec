#pragma once

// Umbrella header.

#include "taxotag/attention.hpp"
#include "taxotag/checkpoint.hpp"
#include "taxotag/common.hpp"
#include "taxotag/config.hpp"
#include "taxotag/corpus.hpp"
#include "taxotag/encoders.hpp"
#include "taxotag/errors.hpp"
#include "taxotag/evaluate.hpp"
#include "taxotag/label_index.hpp"
#include "taxotag/loss.hpp"
#include "taxotag/model.hpp"
#include "taxotag/negatives.hpp"
#include "taxotag/synthetic.hpp"
#include "taxotag/taxonomy.hpp"
#include "taxotag/training.hpp"
