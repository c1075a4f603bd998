#pragma once

#include "stylometer/checkpoint.hpp"
#include "stylometer/common.hpp"
#include "stylometer/conllu.hpp"
#include "stylometer/corpus.hpp"
#include "stylometer/features.hpp"
#include "stylometer/lexicon.hpp"
#include "stylometer/linalg.hpp"
#include "stylometer/mds.hpp"
#include "stylometer/nn.hpp"
#include "stylometer/pipeline.hpp"
#include "stylometer/synthetic.hpp"
#include "stylometer/tagset.hpp"
#include "stylometer/text.hpp"
#include "stylometer/viz.hpp"
