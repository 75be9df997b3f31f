#pragma once

// Convenience header pulling in the whole library.

#include "replisim/classical_assembly.hpp"
#include "replisim/core_model.hpp"
#include "replisim/csv_io.hpp"
#include "replisim/discrimination.hpp"
#include "replisim/grover_engine.hpp"
#include "replisim/isotope_tracker.hpp"
#include "replisim/rng.hpp"
#include "replisim/run_record.hpp"
