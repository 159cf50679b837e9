#pragma once

#include "intent_eval/config.hpp"
#include "intent_eval/corpus.hpp"
#include "intent_eval/embeddings.hpp"
#include "intent_eval/error.hpp"
#include "intent_eval/intent.hpp"
#include "intent_eval/judgments.hpp"
#include "intent_eval/lexical.hpp"
#include "intent_eval/pipeline.hpp"
#include "intent_eval/report.hpp"
#include "intent_eval/segment.hpp"
#include "intent_eval/semantic.hpp"
#include "intent_eval/stats.hpp"
#include "intent_eval/text.hpp"
#include "intent_eval/transport.hpp"
