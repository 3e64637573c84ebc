#pragma once

#include "density.hpp"

#include <iosfwd>

namespace rcn {

//! Plain-text form of a fitted posterior:
//!
//!     rcn-posterior 1
//!     method kde|kliep|lsif
//!     prior <P(+1)>
//!     epsilon <clamp>
//!     dim <m>
//!     class +1                      (then the same block for class -1)
//!     width <w>
//!     rows <k>
//!     <k lines>                     kde: "<x_1> ... <x_m>"
//!                                   ratio: "<alpha> <c_1> ... <c_m>"
//!
//! Stored training values are not written; a loaded estimate evaluates at
//! new points only.
void
save_posterior(std::ostream& out, const CondProbEstimate<double>& cond);
CondProbEstimate<double>
load_posterior(std::istream& in);

} // namespace rcn
