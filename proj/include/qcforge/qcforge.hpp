#pragma once

#include "qcforge/error.hpp"
#include "qcforge/circuit.hpp"
#include "qcforge/text_format.hpp"
#include "qcforge/analysis.hpp"
#include "qcforge/verifier.hpp"
#include "qcforge/transpiler.hpp"
#include "qcforge/optimizers.hpp"
#include "qcforge/benchmarks.hpp"
