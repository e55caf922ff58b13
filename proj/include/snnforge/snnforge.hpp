#pragma once

#include "snnforge/coding/coding.hpp"
#include "snnforge/compiler/analysis.hpp"
#include "snnforge/compiler/lower.hpp"
#include "snnforge/compiler/op_registry.hpp"
#include "snnforge/compiler/toposort.hpp"
#include "snnforge/engine/executor.hpp"
#include "snnforge/frontend/flatten.hpp"
#include "snnforge/frontend/validate.hpp"
#include "snnforge/io/bench.hpp"
#include "snnforge/io/checkpoint.hpp"
#include "snnforge/io/config.hpp"
#include "snnforge/io/csv.hpp"
#include "snnforge/io/dataset.hpp"
#include "snnforge/io/manifest.hpp"
#include "snnforge/learning/bptt.hpp"
#include "snnforge/learning/learner.hpp"
#include "snnforge/learning/train.hpp"
