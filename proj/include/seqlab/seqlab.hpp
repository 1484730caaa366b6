#pragma once

#include "seqlab/chunks.hpp"
#include "seqlab/core.hpp"
#include "seqlab/eval.hpp"
#include "seqlab/infer.hpp"
#include "seqlab/ingest.hpp"
#include "seqlab/runs.hpp"
#include "seqlab/schedule.hpp"
#include "seqlab/schemes.hpp"
#include "seqlab/tagger.hpp"
