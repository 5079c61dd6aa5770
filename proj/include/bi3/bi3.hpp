#pragma once

// Bayes imbalance impact index toolkit: umbrella header.
//
// A header-only library for quantifying how much the class imbalance of a
// binary dataset (as opposed to class overlap or noise) hurts the minority
// class, plus the apparatus to validate the index: comparison hardness
// measures, synthetic dataset generators, imbalance recovery methods, a
// weighted kNN baseline and cross-validated correlation studies.

#include "bi3/csv.hpp"
#include "bi3/dataset.hpp"
#include "bi3/error.hpp"
#include "bi3/eval.hpp"
#include "bi3/keel.hpp"
#include "bi3/linalg.hpp"
#include "bi3/loading.hpp"
#include "bi3/measures.hpp"
#include "bi3/neighbors.hpp"
#include "bi3/parallel.hpp"
#include "bi3/recovery.hpp"
#include "bi3/report.hpp"
#include "bi3/rng.hpp"
#include "bi3/synth.hpp"
