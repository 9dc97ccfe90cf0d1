#pragma once

#include "daas/ancestor.hpp"
#include "daas/baselines.hpp"
#include "daas/circle.hpp"
#include "daas/errors.hpp"
#include "daas/fbm.hpp"
#include "daas/kernels.hpp"
#include "daas/random.hpp"
#include "daas/refine.hpp"
#include "daas/sample_batch.hpp"
