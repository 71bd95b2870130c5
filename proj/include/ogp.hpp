#pragma once

#include <ogp/criteria.hpp>
#include <ogp/csv.hpp>
#include <ogp/error.hpp>
#include <ogp/functions.hpp>
#include <ogp/gp.hpp>
#include <ogp/kernel.hpp>
#include <ogp/lag.hpp>
#include <ogp/linalg.hpp>
#include <ogp/metrics.hpp>
#include <ogp/normalize.hpp>
#include <ogp/online.hpp>
#include <ogp/optimize.hpp>
#include <ogp/params.hpp>
#include <ogp/record.hpp>
#include <ogp/results.hpp>
#include <ogp/simulate.hpp>
#include <ogp/snapshot.hpp>
#include <ogp/types.hpp>
