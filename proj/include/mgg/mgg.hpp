#pragma once

#include "mgg/bool_matrix.hpp"
#include "mgg/conditions.hpp"
#include "mgg/diagram.hpp"
#include "mgg/digraph.hpp"
#include "mgg/dot.hpp"
#include "mgg/error.hpp"
#include "mgg/formula.hpp"
#include "mgg/matching.hpp"
#include "mgg/multigraph.hpp"
#include "mgg/production.hpp"
#include "mgg/satisfaction.hpp"
#include "mgg/sequence.hpp"
#include "mgg/transport.hpp"
