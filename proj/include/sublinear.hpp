#pragma once

#include "sublinear/campaign.hpp"
#include "sublinear/colors_estimator.hpp"
#include "sublinear/exact_oracles.hpp"
#include "sublinear/generators.hpp"
#include "sublinear/lz_estimator.hpp"
#include "sublinear/random.hpp"
#include "sublinear/rle_estimators.hpp"
#include "sublinear/string_access.hpp"
#include "sublinear/substring_trie.hpp"
