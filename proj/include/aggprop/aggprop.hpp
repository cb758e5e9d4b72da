#pragma once

#include "engine.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "experiment.hpp"
#include "features.hpp"
#include "graph.hpp"
#include "labels.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "similarity.hpp"
