#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mgg/formula.hpp"
#include "mgg/conditions.hpp"

TEST(Headers, Compile) { SUCCEED(); }
#include "mgg/transport.hpp"
#include "mgg/multigraph.hpp"
#include "mgg/dot.hpp"
#include "mgg/mgg.hpp"
