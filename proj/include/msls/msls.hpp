#pragma once

#include "msls/core.hpp"
#include "msls/experiment.hpp"
#include "msls/io.hpp"
#include "msls/lloyd.hpp"
#include "msls/local_search.hpp"
#include "msls/nine_eps.hpp"
#include "msls/seeding.hpp"
