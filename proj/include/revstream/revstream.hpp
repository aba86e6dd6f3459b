#pragma once

#include "revstream/constraint.hpp"
#include "revstream/diff.hpp"
#include "revstream/digest.hpp"
#include "revstream/episode.hpp"
#include "revstream/error.hpp"
#include "revstream/forge.hpp"
#include "revstream/harness.hpp"
#include "revstream/jsonl.hpp"
#include "revstream/renderer.hpp"
#include "revstream/rng.hpp"
#include "revstream/semantic_init.hpp"
#include "revstream/token.hpp"
#include "revstream/validity.hpp"
