#pragma once

#include "approximation.hpp"
#include "classifier.hpp"
#include "decision_table.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "extraction.hpp"
#include "format.hpp"
#include "fuzzy.hpp"
#include "induction.hpp"
#include "parallel.hpp"
#include "random.hpp"
