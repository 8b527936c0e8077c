#pragma once

#include "histent/error.hpp"
#include "histent/matrix.hpp"
#include "histent/eigensolver.hpp"
#include "histent/coherent.hpp"
#include "histent/gram.hpp"
#include "histent/entropy.hpp"
#include "histent/majorization.hpp"
#include "histent/timeseries.hpp"
#include "histent/analysis.hpp"
#include "histent/report.hpp"
#include "histent/selfcheck.hpp"
