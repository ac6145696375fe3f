#pragma once

#include "rstlab/rsd.hpp"
#include "rstlab/tree.hpp"

namespace rstlab {

// Head-propagation conversion to the dependency representation: the head of
// a nucleus/satellite pair is the nucleus head, the head of a multinuclear
// node its leftmost child's head. Satellites attach to the propagated
// nucleus head with their own label; non-leftmost multinuclear heads attach
// to the leftmost head with the shared label; the propagated root head gets
// the root arc.
DepDocument to_dependencies(const ConstituentTree& tree);

// Same conversion after debinarize(), so chained multinuclear nodes attach
// to the chain's first head rather than pairwise.
DepDocument to_dependencies(const BinaryTree& btree);

// Central discourse unit: the EDU holding the root arc.
int cdu(const DepDocument& doc);

}  // namespace rstlab
