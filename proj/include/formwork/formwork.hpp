#pragma once

#include "cloud.hpp"
#include "config.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "kdtree.hpp"
#include "members.hpp"
#include "pipeline.hpp"
#include "preprocess.hpp"
#include "rng.hpp"
#include "spacing.hpp"
#include "synth.hpp"
#include "cli.hpp"
