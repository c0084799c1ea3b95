#pragma once

// Umbrella header for the core library. The dataset-fetch layer (fetch.hpp)
// and the command front end (cli.hpp) pull in TLS/zlib and are included
// explicitly by the code that needs them.

#include "muscle/chi_square.hpp"
#include "muscle/cluster.hpp"
#include "muscle/csv.hpp"
#include "muscle/experiment.hpp"
#include "muscle/projection.hpp"
#include "muscle/reference.hpp"
#include "muscle/report.hpp"
#include "muscle/rng.hpp"
#include "muscle/sample.hpp"
#include "muscle/score_test.hpp"
#include "muscle/selection.hpp"
#include "muscle/synthetic.hpp"
#include "muscle/tail.hpp"
