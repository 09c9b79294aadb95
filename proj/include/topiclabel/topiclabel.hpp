#pragma once

#include "topiclabel/aspect.hpp"
#include "topiclabel/coherence.hpp"
#include "topiclabel/eval.hpp"
#include "topiclabel/geometry.hpp"
#include "topiclabel/ingest.hpp"
#include "topiclabel/io.hpp"
#include "topiclabel/labeling.hpp"
#include "topiclabel/lda.hpp"
#include "topiclabel/model_io.hpp"
#include "topiclabel/pipeline.hpp"
#include "topiclabel/preprocess.hpp"
#include "topiclabel/version.hpp"
#include "topiclabel/vocabulary.hpp"
