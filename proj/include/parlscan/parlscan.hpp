#pragma once

// Umbrella header: committee-protocol ingestion, parsing, feature
// extraction, IQR outlier detection, change point detection and the
// precision/FPR evaluation harness.

#include "parlscan/changepoint.hpp"
#include "parlscan/config.hpp"
#include "parlscan/csv.hpp"
#include "parlscan/date.hpp"
#include "parlscan/errors.hpp"
#include "parlscan/evaluate.hpp"
#include "parlscan/features.hpp"
#include "parlscan/ingest.hpp"
#include "parlscan/model.hpp"
#include "parlscan/outliers.hpp"
#include "parlscan/parse.hpp"
#include "parlscan/pipeline.hpp"
#include "parlscan/text.hpp"
