#pragma once

#include "domsim/bench.hpp"
#include "domsim/error.hpp"
#include "domsim/evaluation.hpp"
#include "domsim/kb_store.hpp"
#include "domsim/knn.hpp"
#include "domsim/knowledge_base.hpp"
#include "domsim/metrics.hpp"
#include "domsim/parallel.hpp"
#include "domsim/text_pipeline.hpp"
#include "domsim/vectorspace.hpp"
