#pragma once

// Umbrella header for the domset toolkit: exact domination-number solving
// plus CNN and GIN surrogate models with a built-in float64 autodiff engine.

#include "domset/bitset.hpp"
#include "domset/checkpoint.hpp"
#include "domset/cnn.hpp"
#include "domset/config.hpp"
#include "domset/dataset.hpp"
#include "domset/error.hpp"
#include "domset/eval.hpp"
#include "domset/generators.hpp"
#include "domset/gin.hpp"
#include "domset/graph.hpp"
#include "domset/metrics.hpp"
#include "domset/nn.hpp"
#include "domset/nn_ops.hpp"
#include "domset/optim.hpp"
#include "domset/rng.hpp"
#include "domset/solver.hpp"
#include "domset/tensor.hpp"
#include "domset/train.hpp"
